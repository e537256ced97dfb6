#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "infoorder/experiment.hpp"

namespace infoorder {

/// Finite decision problem. payoff(a, i) is the payoff of action a in state i.
class DecisionProblem {
 public:
  DecisionProblem(std::vector<std::string> actions, Eigen::MatrixXd payoff);
  /// Actions named "a0".."a{k}".
  static DecisionProblem from_matrix(Eigen::MatrixXd payoff);

  const std::vector<std::string>& actions() const { return actions_; }
  const Eigen::MatrixXd& payoff() const { return payoff_; }
  std::size_t action_count() const { return actions_.size(); }
  std::size_t state_count() const { return static_cast<std::size_t>(payoff_.cols()); }

 private:
  std::vector<std::string> actions_;
  Eigen::MatrixXd payoff_;
};

/// Signal x action matrix of choice probabilities.
struct Strategy {
  Eigen::MatrixXd rule;
};

void validate_strategy(const Strategy& s, std::size_t signals, std::size_t actions);

/// u(a, p) for a length-n belief p (p0 implied). Throws BadBelief.
double expected_payoff(const DecisionProblem& dp, std::size_t action, const Eigen::VectorXd& p);

struct ValueResult {
  double value = 0.0;
  std::vector<std::size_t> argmax;  // every action within 1e-12 of the max
};

ValueResult value(const DecisionProblem& dp, const Eigen::VectorXd& p);

/// Expected value of deciding after observing F under prior q.
double ex_ante_value(const DecisionProblem& dp, const FiniteExperiment& f, const Prior& q);

struct QccCertificate {
  std::array<std::size_t, 3> triple{};  // i < j < l with a_j strictly worst
  Eigen::VectorXd belief;               // length n
  double margin = 0.0;
};

struct QccResult {
  bool qcc = true;
  std::optional<QccCertificate> certificate;
};

inline constexpr double kQccThreshold = 1e-9;

/// One LP per ordered triple over the closed belief simplex.
QccResult is_qcc(const DecisionProblem& dp);

/// Every increment row u(a_i) - u(a_{i-1}) is quasi-monotone.
bool is_lsc(const DecisionProblem& dp);

/// Binary subproblems whose values sum to V. Throws NotQCC.
std::vector<DecisionProblem> binary_decompose(const DecisionProblem& dp);

/// Statewise expected payoff of following s after observing F.
Eigen::VectorXd statewise_payoffs(const DecisionProblem& dp, const FiniteExperiment& f,
                                  const Strategy& s);

/// Strategy under F with the same statewise probability of a0 as sG under G.
/// Throws NotBinary or NoMatch.
Strategy match_strategy(const FiniteExperiment& f, const FiniteExperiment& g,
                        const DecisionProblem& dp, const Strategy& sg);

}  // namespace infoorder
