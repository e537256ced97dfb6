#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "infoorder/experiment.hpp"
#include "infoorder/numerics.hpp"

namespace infoorder {

/// Screening environment with ex post signals. Types are beliefs of length n;
/// alternative a reveals the signal with probability psi(a), otherwise the
/// principal sees the null outcome.
struct ScreeningEnv {
  std::vector<std::string> alternatives;
  std::vector<Eigen::VectorXd> types;
  Eigen::VectorXd type_probs;
  Eigen::VectorXd psi;
  Eigen::MatrixXd v1;  // alternative x state
  numerics::PiecewiseLinearConvex v2 = numerics::PiecewiseLinearConvex::linear(0, 1, 1, 0);
  Eigen::MatrixXd u1;  // alternative x state
  double m_lo = 0.0;
  double m_hi = 1.0;

  std::size_t alternative_count() const { return alternatives.size(); }
  std::size_t type_count() const { return types.size(); }
};

void validate_env(const ScreeningEnv& env, std::size_t state_count);

/// Deterministic allocation: alternative index per type.
struct AllocationRule {
  std::vector<std::size_t> choice;
};

/// Randomized allocation: type x alternative probabilities.
struct RandomizedRule {
  Eigen::MatrixXd prob;
};

RandomizedRule to_randomized(const AllocationRule& rule, std::size_t alternatives);

/// t[r](a, x) for reported type r; the last column is the null outcome.
struct TransferRule {
  std::vector<Eigen::MatrixXd> t;
};

/// Utility of true_type when reporting reported_type under rule and t.
double interim_utility(const ScreeningEnv& env, const FiniteExperiment& f,
                       const AllocationRule& rule, const TransferRule& t,
                       std::size_t true_type, std::size_t reported_type);

struct CostSolution {
  double cost = numerics::kInf;  // +inf when the rule is not implementable
  TransferRule transfers;

  bool feasible() const { return cost < numerics::kInf; }
};

/// Minimal expected v2 of transfers implementing the rule under IR and IC.
CostSolution implement_cost(const ScreeningEnv& env, const FiniteExperiment& f,
                            const RandomizedRule& rule);
CostSolution implement_cost(const ScreeningEnv& env, const FiniteExperiment& f,
                            const AllocationRule& rule);

struct MechanismResult {
  bool feasible = false;  // false: every rule infeasible, value is -inf
  double value = -numerics::kInf;
  AllocationRule rule;
  TransferRule transfers;
};

inline constexpr std::size_t kDefaultEnumerationLimit = 4096;

/// Best deterministic rule. The value is a lower bound on the supremum over
/// randomized rules. Throws EnumerationLimit.
MechanismResult optimal_mechanism(const ScreeningEnv& env, const FiniteExperiment& f,
                                  std::size_t limit = kDefaultEnumerationLimit);

struct ScreeningInstance {
  ScreeningEnv env;
  AllocationRule rule;
};

/// From a direction b with support_diff(F, G, b) < 0: a two-type environment
/// whose separating rule is implementable under G but not under F.
ScreeningInstance converse_screening(const FiniteExperiment& g, const Eigen::VectorXd& b);

}  // namespace infoorder
