#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

#include "infoorder/experiment.hpp"
#include "infoorder/numerics.hpp"

namespace infoorder {

/// Utility bounds, quadratic cost c(d) = d'Qd/2 + l'd + c0 over mixed
/// actions d (length n), and the principal's disutility gamma on the bounds.
struct MoralHazardEnv {
  double u_lo = 0.0;
  double u_hi = 1.0;
  Eigen::MatrixXd Q;
  Eigen::VectorXd l;
  double c0 = 0.0;
  numerics::PiecewiseLinearConvex gamma = numerics::PiecewiseLinearConvex::linear(0, 1, 1, 0);

  std::size_t n() const { return static_cast<std::size_t>(l.size()); }
};

/// Throws on asymmetric or indefinite Q, bad bounds, or a gamma domain that
/// differs from the bounds.
void validate_env(const MoralHazardEnv& env);

/// Mixed action over theta_1..theta_n; theta_0 gets the rest.
struct TargetAction {
  Eigen::VectorXd delta;

  explicit TargetAction(Eigen::VectorXd d);
  bool interior() const;
  Eigen::VectorXd full() const;
};

double cost(const MoralHazardEnv& env, const TargetAction& t);
/// Q delta + l.
Eigen::VectorXd cost_gradient(const MoralHazardEnv& env, const TargetAction& t);

enum class Sense { Equal, LessEqual, GreaterEqual };

struct ConstraintRow {
  std::string tag;
  Eigen::VectorXd coeffs;  // over signals
  Sense sense = Sense::Equal;
  double rhs = 0.0;
};

struct MHConstraints {
  ConstraintRow ir;
  std::vector<ConstraintRow> ic;
};

/// IR and first-order incentive rows for the agent's choice over the full
/// action simplex: equalities inside the face containing delta, weak
/// inequalities off it.
MHConstraints build_constraints(const MoralHazardEnv& env, const FiniteExperiment& f,
                                const TargetAction& t);

bool implementable(const MoralHazardEnv& env, const FiniteExperiment& f, const TargetAction& t);

struct SchemeSolution {
  Eigen::VectorXd w;                 // empty when not implementable
  double disutility = numerics::kInf;
  std::vector<std::string> binding;  // tags of tight rows

  bool feasible() const { return disutility < numerics::kInf; }
};

/// Minimal expected disutility of implementing t; +inf when impossible.
SchemeSolution min_disutility(const MoralHazardEnv& env, const FiniteExperiment& f,
                              const TargetAction& t);

/// Lagrangian dual objective at delta = 0:
/// lambda c(0) - mu . grad c(0) - sum_x f(x|0) rho(lambda + sum_i mu_i (1 - l_i(x))).
/// Throws ZeroBaseDensity when row theta_0 has a zero.
double dual_value(const MoralHazardEnv& env, const FiniteExperiment& f, double lambda,
                  const Eigen::VectorXd& mu);

struct DualSolution {
  double value = 0.0;  // +inf when the primal is infeasible
  double lambda = 0.0;
  Eigen::VectorXd mu;
};

/// Maximizes dual_value over lambda, mu >= 0.
DualSolution dual_solve(const MoralHazardEnv& env, const FiniteExperiment& f);

/// Lower convex hull of the achievable (utility, disutility) pairs.
std::pair<numerics::PiecewiseLinearConvex, std::pair<double, double>> build_gamma(
    const std::vector<double>& payments, const std::vector<double>& u_of_s,
    const std::vector<double>& v_of_s);

struct MoralHazardInstance {
  MoralHazardEnv env;
  TargetAction target;
};

/// From a direction b with support_diff(F, G, b) < 0: an environment whose
/// target (the barycenter) is implementable under G but not under F.
MoralHazardInstance converse_moral_hazard(const FiniteExperiment& g, const Eigen::VectorXd& b);

}  // namespace infoorder
