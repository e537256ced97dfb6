#include "infoorder/decision.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "infoorder/error.hpp"
#include "infoorder/lborder.hpp"
#include "infoorder/numerics.hpp"

namespace infoorder {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

Index idx(std::size_t i) { return static_cast<Index>(i); }

void require_states(const DecisionProblem& dp, std::size_t states) {
  if (dp.state_count() != states) {
    throw Error(ErrorCode::StateMismatch, "decision problem and experiment disagree on states");
  }
}

}  // namespace

DecisionProblem::DecisionProblem(std::vector<std::string> actions, MatrixXd payoff)
    : actions_(std::move(actions)), payoff_(std::move(payoff)) {
  if (actions_.empty()) throw Error(ErrorCode::DegenerateInput, "no actions");
  if (payoff_.rows() != idx(actions_.size())) {
    throw Error(ErrorCode::DimensionMismatch, "payoff needs one row per action");
  }
  if (payoff_.cols() < 1) throw Error(ErrorCode::DimensionMismatch, "payoff has no states");
  std::set<std::string> seen;
  for (std::size_t a = 0; a < actions_.size(); ++a) {
    if (!seen.insert(actions_[a]).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate action '" + actions_[a] + "'", a);
    }
    if (!payoff_.row(idx(a)).allFinite()) {
      throw Error(ErrorCode::InvalidArgument, "non-finite payoff", a);
    }
  }
}

DecisionProblem DecisionProblem::from_matrix(MatrixXd payoff) {
  std::vector<std::string> names;
  for (Index a = 0; a < payoff.rows(); ++a) names.push_back("a" + std::to_string(a));
  return DecisionProblem(std::move(names), std::move(payoff));
}

void validate_strategy(const Strategy& s, std::size_t signals, std::size_t actions) {
  if (s.rule.rows() != idx(signals) || s.rule.cols() != idx(actions)) {
    throw Error(ErrorCode::DimensionMismatch, "strategy must be signals x actions");
  }
  validate_matrix(s.rule);
}

double expected_payoff(const DecisionProblem& dp, std::size_t action, const VectorXd& p) {
  if (action >= dp.action_count()) throw Error(ErrorCode::IndexError, "action index", action);
  if (p.size() + 1 != idx(dp.state_count())) {
    throw Error(ErrorCode::BadBelief, "belief length must be one less than the state count");
  }
  return dp.payoff().row(idx(action)).dot(full_belief(p));
}

ValueResult value(const DecisionProblem& dp, const VectorXd& p) {
  if (p.size() + 1 != idx(dp.state_count())) {
    throw Error(ErrorCode::BadBelief, "belief length must be one less than the state count");
  }
  const VectorXd payoffs = dp.payoff() * full_belief(p);
  ValueResult r;
  r.value = payoffs.maxCoeff();
  for (Index a = 0; a < payoffs.size(); ++a) {
    if (payoffs(a) >= r.value - 1e-12) r.argmax.push_back(static_cast<std::size_t>(a));
  }
  return r;
}

double ex_ante_value(const DecisionProblem& dp, const FiniteExperiment& f, const Prior& q) {
  require_states(dp, f.state_count());
  if (q.q.size() + 1 != idx(f.state_count())) {
    throw Error(ErrorCode::StateMismatch, "prior length must be one less than the state count");
  }
  const VectorXd prior = q.full();
  // Column x holds q_i f(x|i); the best action per signal is applied to it.
  const MatrixXd joint = prior.asDiagonal() * f.matrix();
  const MatrixXd scores = dp.payoff() * joint;  // action x signal
  return scores.colwise().maxCoeff().sum();
}

QccResult is_qcc(const DecisionProblem& dp) {
  const std::size_t k = dp.action_count();
  const Index states = idx(dp.state_count());
  const MatrixXd& u = dp.payoff();
  QccResult out;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      for (std::size_t l = j + 1; l < k; ++l) {
        // Variables p_0..p_n, m. maximize m.
        numerics::LinearProgram lp(static_cast<std::size_t>(states + 1));
        const Index m = states;
        lp.variable_bounds[static_cast<std::size_t>(m)] = {-numerics::kInf, numerics::kInf};
        lp.objective(m) = -1.0;
        VectorXd simplex = VectorXd::Zero(states + 1);
        simplex.head(states).setOnes();
        lp.add_equality(simplex, 1.0);
        for (std::size_t outer : {i, l}) {
          VectorXd row(states + 1);
          row.head(states) = (u.row(idx(j)) - u.row(idx(outer))).transpose();
          row(m) = 1.0;
          lp.add_less_equal(std::move(row), 0.0);
        }
        const auto res = numerics::solve_lp(lp);
        if (res.status != numerics::LPStatus::Optimal) continue;
        const double margin = -res.value;
        if (margin > kQccThreshold) {
          QccCertificate c;
          c.triple = {i, j, l};
          VectorXd p = res.point.head(states).cwiseMax(0.0);
          p /= p.sum();
          c.belief = p.tail(states - 1);
          c.margin = margin;
          out.qcc = false;
          out.certificate = std::move(c);
          return out;
        }
      }
    }
  }
  return out;
}

bool is_lsc(const DecisionProblem& dp) {
  const MatrixXd& u = dp.payoff();
  for (Index a = 1; a < u.rows(); ++a) {
    if (!is_quasi_monotone((u.row(a) - u.row(a - 1)).transpose())) return false;
  }
  return true;
}

std::vector<DecisionProblem> binary_decompose(const DecisionProblem& dp) {
  if (dp.action_count() < 2) {
    throw Error(ErrorCode::NotBinary, "decomposition needs at least two actions");
  }
  if (!is_qcc(dp).qcc) throw Error(ErrorCode::NotQCC, "problem is not quasi-concave in actions");
  const MatrixXd& u = dp.payoff();
  const auto& names = dp.actions();
  std::vector<DecisionProblem> out;
  out.emplace_back(std::vector<std::string>{names[0], names[1]}, MatrixXd(u.topRows(2)));
  for (std::size_t i = 1; i + 1 < dp.action_count(); ++i) {
    MatrixXd sub(2, u.cols());
    sub.row(0).setZero();
    sub.row(1) = u.row(idx(i + 1)) - u.row(idx(i));
    out.emplace_back(std::vector<std::string>{names[i], names[i + 1]}, std::move(sub));
  }
  return out;
}

VectorXd statewise_payoffs(const DecisionProblem& dp, const FiniteExperiment& f,
                           const Strategy& s) {
  if (dp.state_count() != f.state_count()) {
    throw Error(ErrorCode::DimensionMismatch, "decision problem and experiment disagree on states");
  }
  validate_strategy(s, f.signal_count(), dp.action_count());
  // (M * rule)(i, a) is the probability of action a in state i.
  const MatrixXd action_probs = f.matrix() * s.rule;
  return (action_probs.cwiseProduct(dp.payoff().transpose())).rowwise().sum();
}

Strategy match_strategy(const FiniteExperiment& f, const FiniteExperiment& g,
                        const DecisionProblem& dp, const Strategy& sg) {
  if (dp.action_count() != 2) throw Error(ErrorCode::NotBinary, "matching needs two actions");
  if (f.state_count() != g.state_count()) {
    throw Error(ErrorCode::StateMismatch, "experiments live on different state spaces");
  }
  validate_strategy(sg, g.signal_count(), 2);
  if (f.signal_count() == g.signal_count() && f.matrix() == g.matrix()) return sg;

  const VectorXd target = g.matrix() * sg.rule.col(0);
  const Index m = idx(f.signal_count());
  numerics::LinearProgram lp(static_cast<std::size_t>(m));
  for (auto& b : lp.variable_bounds) b = {0.0, 1.0};
  for (Index i = 0; i < f.matrix().rows(); ++i) {
    lp.add_equality(f.matrix().row(i).transpose(), target(i));
  }
  const auto res = numerics::solve_lp(lp);
  if (res.status != numerics::LPStatus::Optimal) {
    throw Error(ErrorCode::NoMatch, "no signal-contingent rule reproduces the statewise expectations");
  }
  Strategy out;
  out.rule.resize(m, 2);
  out.rule.col(0) = res.point.cwiseMax(0.0).cwiseMin(1.0);
  out.rule.col(1) = VectorXd::Ones(m) - out.rule.col(0);
  return out;
}

}  // namespace infoorder
