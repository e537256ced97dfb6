#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace infoorder {

/// Ordered state labels; index 0 is the baseline state.
class StateSpace {
 public:
  explicit StateSpace(std::vector<std::string> labels);
  /// Labels "t0".."t{count-1}".
  static StateSpace indexed(std::size_t count);

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  /// Number of non-baseline states.
  std::size_t n() const { return labels_.size() - 1; }

  bool operator==(const StateSpace& other) const { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
};

/// Row-stochastic likelihood matrix: entry (i, j) is the probability of
/// signal j in state i. Validated on construction and immutable after.
class FiniteExperiment {
 public:
  FiniteExperiment(StateSpace states, std::vector<std::string> signals,
                   Eigen::MatrixXd matrix);
  /// Signals named "x0".."x{m-1}" and states "t0"..
  static FiniteExperiment from_matrix(Eigen::MatrixXd matrix,
                                      const std::string& signal_prefix = "x");

  const StateSpace& states() const { return states_; }
  const std::vector<std::string>& signals() const { return signals_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  std::size_t state_count() const { return states_.size(); }
  std::size_t signal_count() const { return signals_.size(); }
  /// Likelihood vector of signal j across states.
  Eigen::VectorXd column(std::size_t j) const {
    return matrix_.col(static_cast<Eigen::Index>(j));
  }

 private:
  StateSpace states_;
  std::vector<std::string> signals_;
  Eigen::MatrixXd matrix_;
};

/// Signal densities on a grid with quadrature weights.
struct GridExperiment {
  StateSpace states;
  std::vector<double> grid;
  Eigen::MatrixXd densities;  // state x point
  std::vector<double> weights;
};

/// Trapezoid-rule weights for a strictly increasing grid.
std::vector<double> trapezoid_weights(const std::vector<double>& grid);

/// Probabilities of theta_1..theta_n; theta_0 gets the remainder.
struct Prior {
  Eigen::VectorXd q;

  static Prior uniform(std::size_t n);
  /// Full n+1 vector (q0, q1, ..., qn). Throws BadBelief when outside the simplex.
  Eigen::VectorXd full() const;
};

/// Converts a length-n belief into the full n+1 vector; throws BadBelief.
Eigen::VectorXd full_belief(const Eigen::VectorXd& p, double tol = 1e-9);

struct WeightedDichotomy {
  std::vector<std::size_t> omega0;
  std::vector<std::size_t> omega1;
  Eigen::VectorXd w0;
  Eigen::VectorXd w1;
};

/// Stochastic kernel from source signals (rows) to target signals (columns).
struct Garbling {
  Eigen::MatrixXd kernel;
};

inline constexpr double kRowSumTolerance = 1e-9;

/// Throws RowSumError / NegativeEntry / EmptySignalSet naming the index.
void validate(const FiniteExperiment& f);
void validate_matrix(const Eigen::MatrixXd& matrix, double row_tol = kRowSumTolerance);

/// Posterior over theta_1..theta_n after signal j. Throws ZeroMarginal.
Eigen::VectorXd posterior(const FiniteExperiment& f, const Prior& q, std::size_t signal);

/// One vector per signal holding f(x|theta_i)/f(x|theta_base), i != base.
std::vector<Eigen::VectorXd> likelihood_ratios(const FiniteExperiment& f,
                                               std::size_t base = 0);

/// Distribution of the posterior expectation of phi (length n+1), atoms
/// sorted by value with values closer than 1e-12 merged.
std::vector<std::pair<double, double>> posterior_mean_distribution(
    const FiniteExperiment& f, const Prior& q, const Eigen::VectorXd& phi);

FiniteExperiment product(const FiniteExperiment& f1, const FiniteExperiment& f2);
FiniteExperiment mixture(const FiniteExperiment& f1, const FiniteExperiment& f2, double t);
FiniteExperiment dichotomy_reduce(const FiniteExperiment& f, const WeightedDichotomy& d);
void validate_dichotomy(const WeightedDichotomy& d, std::size_t state_count);
/// Row i of the result is row beta[i] of f.
FiniteExperiment relabel(const FiniteExperiment& f, const std::vector<std::size_t>& beta);
FiniteExperiment apply_garbling(const FiniteExperiment& f, const Garbling& k);
bool is_irredundant(const FiniteExperiment& f);

/// Cell probabilities density*weight, renormalized per state.
/// Throws DegenerateGrid when the quadrature mass misses 1 by more than 1e-6.
FiniteExperiment discretize(const GridExperiment& g);
/// Largest |sum_j density(i,j) * weight(j) - 1| over states.
double quadrature_residual(const GridExperiment& g);

/// F(eps) and G-hat from the standard counterexample to Blackwell
/// dominance, on n+1 states.
FiniteExperiment revealing_with_noise(std::size_t n, double eps);
FiniteExperiment exclusion_experiment(std::size_t n);

}  // namespace infoorder
