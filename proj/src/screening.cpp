#include "infoorder/screening.hpp"

#include <algorithm>
#include <cmath>

#include "infoorder/error.hpp"
#include "infoorder/lborder.hpp"

namespace infoorder {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using numerics::kInf;

Index idx(std::size_t i) { return static_cast<Index>(i); }

// Probability of each extended outcome (signals then null) for a belief.
VectorXd outcome_probs(const ScreeningEnv& env, const FiniteExperiment& f, const VectorXd& full,
                       std::size_t alt) {
  const Index m = idx(f.signal_count());
  VectorXd p(m + 1);
  const double psi = env.psi(idx(alt));
  p.head(m) = psi * (f.matrix().transpose() * full);
  p(m) = 1.0 - psi;
  return p;
}

double clamp_zero(const ScreeningEnv& env) { return std::clamp(0.0, env.m_lo, env.m_hi); }

}  // namespace

void validate_env(const ScreeningEnv& env, std::size_t state_count) {
  const Index a = idx(env.alternatives.size());
  if (a == 0) throw Error(ErrorCode::DegenerateInput, "no alternatives");
  if (env.types.empty()) throw Error(ErrorCode::DegenerateInput, "no types");
  for (std::size_t r = 0; r < env.types.size(); ++r) {
    if (env.types[r].size() + 1 != idx(state_count)) {
      throw Error(ErrorCode::DimensionMismatch, "type belief must have length n", r);
    }
    try {
      full_belief(env.types[r]);
    } catch (const Error&) {
      throw Error(ErrorCode::BadBelief, "type is not a belief", r);
    }
  }
  if (env.type_probs.size() != idx(env.types.size())) {
    throw Error(ErrorCode::DimensionMismatch, "type_probs needs one entry per type");
  }
  if ((env.type_probs.array() < 0.0).any() || std::abs(env.type_probs.sum() - 1.0) > 1e-9) {
    throw Error(ErrorCode::BadWeight, "type_probs must be a probability vector");
  }
  if (env.psi.size() != a) {
    throw Error(ErrorCode::DimensionMismatch, "psi needs one entry per alternative");
  }
  if ((env.psi.array() < 0.0).any() || (env.psi.array() > 1.0).any()) {
    throw Error(ErrorCode::InvalidArgument, "psi must lie in [0, 1]");
  }
  for (const auto* m : {&env.v1, &env.u1}) {
    if (m->rows() != a || m->cols() != idx(state_count)) {
      throw Error(ErrorCode::DimensionMismatch, "v1 and u1 must be alternatives x states");
    }
    if (!m->allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite payoff");
  }
  if (!(env.m_lo < env.m_hi)) throw Error(ErrorCode::InvalidArgument, "m_bounds must satisfy lo < hi");
}

RandomizedRule to_randomized(const AllocationRule& rule, std::size_t alternatives) {
  RandomizedRule out;
  out.prob = MatrixXd::Zero(idx(rule.choice.size()), idx(alternatives));
  for (std::size_t r = 0; r < rule.choice.size(); ++r) {
    if (rule.choice[r] >= alternatives) {
      throw Error(ErrorCode::IndexError, "alternative index out of range", r);
    }
    out.prob(idx(r), idx(rule.choice[r])) = 1.0;
  }
  return out;
}

double interim_utility(const ScreeningEnv& env, const FiniteExperiment& f,
                       const AllocationRule& rule, const TransferRule& t,
                       std::size_t true_type, std::size_t reported_type) {
  if (true_type >= env.type_count()) throw Error(ErrorCode::IndexError, "true type", true_type);
  if (reported_type >= env.type_count()) {
    throw Error(ErrorCode::IndexError, "reported type", reported_type);
  }
  if (rule.choice.size() != env.type_count() || t.t.size() != env.type_count()) {
    throw Error(ErrorCode::DimensionMismatch, "rule and transfers need one entry per type");
  }
  const std::size_t a = rule.choice[reported_type];
  if (a >= env.alternative_count()) throw Error(ErrorCode::IndexError, "alternative", a);
  const MatrixXd& tr = t.t[reported_type];
  if (tr.rows() != idx(env.alternative_count()) || tr.cols() != idx(f.signal_count() + 1)) {
    throw Error(ErrorCode::DimensionMismatch, "transfer block must be alternatives x (signals + 1)");
  }
  const VectorXd full = full_belief(env.types[true_type]);
  return env.u1.row(idx(a)).dot(full) +
         outcome_probs(env, f, full, a).dot(tr.row(idx(a)).transpose());
}

CostSolution implement_cost(const ScreeningEnv& env, const FiniteExperiment& f,
                            const RandomizedRule& rule) {
  validate_env(env, f.state_count());
  const std::size_t types = env.type_count();
  const std::size_t alts = env.alternative_count();
  if (rule.prob.rows() != idx(types) || rule.prob.cols() != idx(alts)) {
    throw Error(ErrorCode::DimensionMismatch, "rule must be types x alternatives");
  }
  validate_matrix(rule.prob);
  const Index s = idx(f.signal_count() + 1);

  // Transfer block offset per (reported type, alternative) in use.
  std::vector<std::vector<Index>> block(types, std::vector<Index>(alts, -1));
  Index used = 0;
  for (std::size_t r = 0; r < types; ++r) {
    for (std::size_t a = 0; a < alts; ++a) {
      if (rule.prob(idx(r), idx(a)) > 0.0) block[r][a] = (used++) * s;
    }
  }
  const Index nt = used * s;  // transfers, then as many epigraph variables
  const Index total = 2 * nt;

  std::vector<VectorXd> fulls;
  for (const auto& p : env.types) fulls.push_back(full_belief(p));

  // U(r, r') = constant + coeffs . x
  auto utility = [&](std::size_t r, std::size_t rep, VectorXd& coeffs) {
    double constant = 0.0;
    coeffs = VectorXd::Zero(total);
    for (std::size_t a = 0; a < alts; ++a) {
      const double pa = rule.prob(idx(rep), idx(a));
      if (pa <= 0.0) continue;
      constant += pa * env.u1.row(idx(a)).dot(fulls[r]);
      coeffs.segment(block[rep][a], s) += pa * outcome_probs(env, f, fulls[r], a);
    }
    return constant;
  };

  numerics::LinearProgram lp(static_cast<std::size_t>(total));
  for (Index v = 0; v < nt; ++v) {
    lp.variable_bounds[static_cast<std::size_t>(v)] = {env.m_lo, env.m_hi};
    lp.variable_bounds[static_cast<std::size_t>(nt + v)] = {-kInf, kInf};
  }
  for (std::size_t r = 0; r < types; ++r) {
    VectorXd own;
    const double c_own = utility(r, r, own);
    lp.add_greater_equal(own, -c_own);
    for (std::size_t rep = 0; rep < types; ++rep) {
      if (rep == r) continue;
      VectorXd other;
      const double c_other = utility(r, rep, other);
      lp.add_greater_equal(own - other, c_other - c_own);
    }
    for (std::size_t a = 0; a < alts; ++a) {
      const double pa = rule.prob(idx(r), idx(a));
      if (pa <= 0.0) continue;
      lp.objective.segment(nt + block[r][a], s) +=
          env.type_probs(idx(r)) * pa * outcome_probs(env, f, fulls[r], a);
    }
  }
  const auto& bp = env.v2.breakpoints();
  const auto& vv = env.v2.values();
  const auto slopes = env.v2.slopes();
  for (Index v = 0; v < nt; ++v) {
    if (slopes.empty()) {
      VectorXd row = VectorXd::Zero(total);
      row(nt + v) = -1.0;
      lp.add_less_equal(std::move(row), -vv[0]);
      continue;
    }
    for (std::size_t k = 0; k < slopes.size(); ++k) {
      VectorXd row = VectorXd::Zero(total);
      row(v) = slopes[k];
      row(nt + v) = -1.0;
      lp.add_less_equal(std::move(row), slopes[k] * bp[k] - vv[k]);
    }
  }

  const auto res = numerics::solve_lp(lp);
  CostSolution out;
  if (res.status != numerics::LPStatus::Optimal) return out;
  out.transfers.t.assign(types, MatrixXd::Constant(idx(alts), s, clamp_zero(env)));
  double cost = 0.0;
  for (std::size_t r = 0; r < types; ++r) {
    for (std::size_t a = 0; a < alts; ++a) {
      if (block[r][a] < 0) continue;
      const VectorXd t = res.point.segment(block[r][a], s);
      out.transfers.t[r].row(idx(a)) = t.transpose();
      const VectorXd probs = outcome_probs(env, f, fulls[r], a);
      for (Index x = 0; x < s; ++x) {
        cost += env.type_probs(idx(r)) * rule.prob(idx(r), idx(a)) * probs(x) * env.v2(t(x));
      }
    }
  }
  out.cost = cost;
  return out;
}

CostSolution implement_cost(const ScreeningEnv& env, const FiniteExperiment& f,
                            const AllocationRule& rule) {
  if (rule.choice.size() != env.type_count()) {
    throw Error(ErrorCode::DimensionMismatch, "rule needs one alternative per type");
  }
  return implement_cost(env, f, to_randomized(rule, env.alternative_count()));
}

MechanismResult optimal_mechanism(const ScreeningEnv& env, const FiniteExperiment& f,
                                  std::size_t limit) {
  validate_env(env, f.state_count());
  const std::size_t types = env.type_count();
  const std::size_t alts = env.alternative_count();
  std::size_t count = 1;
  for (std::size_t r = 0; r < types; ++r) {
    if (count > limit / alts + 1) {
      count = limit + 1;
      break;
    }
    count *= alts;
  }
  if (count > limit) {
    throw Error(ErrorCode::EnumerationLimit,
                "more than " + std::to_string(limit) + " deterministic rules");
  }

  std::vector<VectorXd> fulls;
  for (const auto& p : env.types) fulls.push_back(full_belief(p));

  MechanismResult best;
  AllocationRule rule{std::vector<std::size_t>(types, 0)};
  for (std::size_t k = 0; k < count; ++k) {
    const auto c = implement_cost(env, f, rule);
    if (c.feasible()) {
      double gain = 0.0;
      for (std::size_t r = 0; r < types; ++r) {
        gain += env.type_probs(idx(r)) * env.v1.row(idx(rule.choice[r])).dot(fulls[r]);
      }
      const double w = gain - c.cost;
      if (!best.feasible || w > best.value + 1e-12) {
        best.feasible = true;
        best.value = w;
        best.rule = rule;
        best.transfers = c.transfers;
      }
    }
    // Next rule in lexicographic order.
    for (std::size_t pos = types; pos-- > 0;) {
      if (++rule.choice[pos] < alts) break;
      rule.choice[pos] = 0;
    }
  }
  return best;
}

ScreeningInstance converse_screening(const FiniteExperiment& g, const VectorXd& b) {
  if (b.size() != idx(g.state_count())) {
    throw Error(ErrorCode::DimensionMismatch, "direction length must equal the state count");
  }
  double b0 = 0.0;
  double b1 = 0.0;
  for (Index i = 0; i < b.size(); ++i) (b(i) > 0.0 ? b1 : b0) += b(i);
  const WeightedDichotomy d = dichotomy_from_witness(b);
  const FiniteExperiment go = dichotomy_reduce(g, d);

  // Separating direction on the two groups with the positive side first.
  const Eigen::Vector2d sep(-b0, -b1);
  Eigen::Vector2d z = Eigen::Vector2d::Zero();
  for (Index y = 0; y < go.matrix().cols(); ++y) {
    if (sep.dot(go.matrix().col(y)) > 0.0) z += go.matrix().col(y);
  }
  const Eigen::Vector2d zc = Eigen::Vector2d::Ones() - z;

  const Index states = b.size();
  ScreeningEnv env;
  env.alternatives = {"a0", "a1"};
  VectorXd p0 = VectorXd::Zero(states);
  VectorXd p1 = VectorXd::Zero(states);
  for (std::size_t k = 0; k < d.omega0.size(); ++k) p0(idx(d.omega0[k])) = d.w0(idx(k));
  for (std::size_t k = 0; k < d.omega1.size(); ++k) p1(idx(d.omega1[k])) = d.w1(idx(k));
  env.types = {p0.tail(states - 1), p1.tail(states - 1)};
  env.type_probs = Eigen::Vector2d(0.5, 0.5);
  env.psi = Eigen::Vector2d(1.0, 1.0);
  env.v1 = MatrixXd::Zero(2, states);
  env.v2 = numerics::PiecewiseLinearConvex::constant(0.0, 1.0, 0.0);
  env.u1 = MatrixXd::Zero(2, states);
  for (auto i : d.omega0) {
    env.u1(0, idx(i)) = -z(0);
    env.u1(1, idx(i)) = -zc(0);
  }
  for (auto i : d.omega1) {
    env.u1(0, idx(i)) = -z(1);
    env.u1(1, idx(i)) = -zc(1);
  }
  env.m_lo = 0.0;
  env.m_hi = 1.0;
  return {std::move(env), AllocationRule{{0, 1}}};
}

}  // namespace infoorder
