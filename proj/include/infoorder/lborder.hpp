#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "infoorder/experiment.hpp"

namespace infoorder {

enum class OrderMethod { ExactRays, SampledHemisphere, GarblingLP };

std::string_view to_string(OrderMethod m);

struct OrderVerdict {
  bool holds = false;
  std::optional<Eigen::VectorXd> witness;
  double margin = 0.0;
  OrderMethod method = OrderMethod::ExactRays;
  // Garbling evidence from blackwell_check.
  std::optional<Eigen::MatrixXd> kernel;
  // Failing relabeling from lb_via_relabelings.
  std::optional<std::vector<std::size_t>> permutation;
};

struct RayLimits {
  std::size_t max_signals = 64;  // F and G together
  std::size_t max_states = 6;
};

/// Verdicts count margins down to this as holding.
inline constexpr double kMarginTolerance = 1e-9;

/// sum_j (b . F_j)_+ - sum_k (b . G_k)_+ over likelihood columns.
double support_diff(const FiniteExperiment& f, const FiniteExperiment& g,
                    const Eigen::VectorXd& b);
double zonoid_support(const FiniteExperiment& f, const Eigen::VectorXd& b);

/// Exact LB check by enumerating the extreme rays of the column hyperplane
/// arrangement. Witnesses are scaled to max |b_i| = 1, first nonzero entry
/// positive.
OrderVerdict lb_exact(const FiniteExperiment& f, const FiniteExperiment& g,
                      const RayLimits& limits = {});

/// Random hemisphere sample plus coordinate descent from the 16 worst
/// points. A failing verdict is a certificate, a holding one is not.
OrderVerdict lb_sampled(const FiniteExperiment& f, const FiniteExperiment& g,
                        std::size_t resolution, std::uint64_t seed = 0);
OrderVerdict lb_sampled(const GridExperiment& f, const GridExperiment& g,
                        std::size_t resolution, std::uint64_t seed = 0);
OrderVerdict lb_sampled(const FiniteExperiment& f, const GridExperiment& g,
                        std::size_t resolution, std::uint64_t seed = 0);
OrderVerdict lb_sampled(const GridExperiment& f, const FiniteExperiment& g,
                        std::size_t resolution, std::uint64_t seed = 0);

/// No strictly positive entry before a strictly negative one.
bool is_quasi_monotone(const Eigen::VectorXd& b);

/// LB restricted to quasi-monotone directions in the given state order.
/// The witness is reported in its quasi-monotone orientation.
OrderVerdict mpe_check(const FiniteExperiment& f, const FiniteExperiment& g,
                       const RayLimits& limits = {});

/// mpe_check under every relabeling of the states (n+1 <= 7).
OrderVerdict lb_via_relabelings(const FiniteExperiment& f, const FiniteExperiment& g);

/// Garbling LP: min t s.t. |M_F K - M_G| <= t entrywise, K stochastic.
/// holds iff t <= feasibility tolerance; margin is -t.
OrderVerdict blackwell_check(const FiniteExperiment& f, const FiniteExperiment& g);

bool lb_equivalent(const FiniteExperiment& f, const FiniteExperiment& g);

/// Splits states by the sign of b; throws OneSignedWitness.
WeightedDichotomy dichotomy_from_witness(const Eigen::VectorXd& b);

}  // namespace infoorder
