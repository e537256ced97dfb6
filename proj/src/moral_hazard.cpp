#include "infoorder/moral_hazard.hpp"

#include <algorithm>
#include <cmath>

#include "infoorder/error.hpp"

namespace infoorder {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using numerics::kInf;

constexpr double kSupportTolerance = 1e-12;
constexpr double kBindingTolerance = 1e-8;

void require_states(const MoralHazardEnv& env, const FiniteExperiment& f, const TargetAction& t) {
  if (f.state_count() != env.n() + 1 || static_cast<std::size_t>(t.delta.size()) != env.n()) {
    throw Error(ErrorCode::StateMismatch, "environment, experiment and target disagree on n");
  }
}

// Adds IR and IC rows over the first m variables of an LP with `total` columns.
void add_rows(numerics::LinearProgram& lp, const MHConstraints& c, Index total) {
  auto pad = [total](const VectorXd& v) {
    VectorXd row = VectorXd::Zero(total);
    row.head(v.size()) = v;
    return row;
  };
  lp.add_greater_equal(pad(c.ir.coeffs), c.ir.rhs);
  for (const auto& r : c.ic) {
    switch (r.sense) {
      case Sense::Equal: lp.add_equality(pad(r.coeffs), r.rhs); break;
      case Sense::LessEqual: lp.add_less_equal(pad(r.coeffs), r.rhs); break;
      case Sense::GreaterEqual: lp.add_greater_equal(pad(r.coeffs), r.rhs); break;
    }
  }
}

}  // namespace

void validate_env(const MoralHazardEnv& env) {
  if (!(env.u_lo <= env.u_hi)) throw Error(ErrorCode::InvalidArgument, "u_bounds reversed");
  const Index n = env.l.size();
  if (env.Q.rows() != n || env.Q.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "cost Q must be n x n with n = len(l)");
  }
  if (n > 0) {
    if ((env.Q - env.Q.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
      throw Error(ErrorCode::NotConvex, "cost Q is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(env.Q);
    if (es.eigenvalues().minCoeff() < -1e-9) {
      throw Error(ErrorCode::NotConvex, "cost Q is not positive semidefinite");
    }
  }
  const double scale = 1e-9 * (1.0 + std::max(std::abs(env.u_lo), std::abs(env.u_hi)));
  if (std::abs(env.gamma.lo() - env.u_lo) > scale || std::abs(env.gamma.hi() - env.u_hi) > scale) {
    throw Error(ErrorCode::InvalidArgument, "gamma domain must equal u_bounds");
  }
}

TargetAction::TargetAction(VectorXd d) : delta(std::move(d)) {
  full_belief(delta);  // throws BadBelief outside the simplex
}

bool TargetAction::interior() const {
  return (delta.array() > 0.0).all() && delta.sum() < 1.0;
}

VectorXd TargetAction::full() const { return full_belief(delta); }

double cost(const MoralHazardEnv& env, const TargetAction& t) {
  return 0.5 * t.delta.dot(env.Q * t.delta) + env.l.dot(t.delta) + env.c0;
}

VectorXd cost_gradient(const MoralHazardEnv& env, const TargetAction& t) {
  if (t.delta.size() != env.l.size()) {
    throw Error(ErrorCode::DimensionMismatch, "target length must match the cost");
  }
  return env.Q * t.delta + env.l;
}

MHConstraints build_constraints(const MoralHazardEnv& env, const FiniteExperiment& f,
                                const TargetAction& t) {
  require_states(env, f, t);
  const MatrixXd& m = f.matrix();
  const Index n = static_cast<Index>(env.n());
  const VectorXd full = t.full();
  const VectorXd grad = cost_gradient(env, t);

  MHConstraints out;
  out.ir = {"IR", m.transpose() * full, Sense::GreaterEqual, cost(env, t)};

  // Marginal gain of shifting mass from theta_0 to theta_i is d_i . w - c_i.
  std::vector<VectorXd> d(static_cast<std::size_t>(n + 1));
  std::vector<double> c(static_cast<std::size_t>(n + 1), 0.0);
  d[0] = VectorXd::Zero(m.cols());
  for (Index i = 1; i <= n; ++i) {
    d[static_cast<std::size_t>(i)] = (m.row(i) - m.row(0)).transpose();
    c[static_cast<std::size_t>(i)] = grad(i - 1);
  }
  auto in_support = [&](Index i) { return full(i) > kSupportTolerance; };
  auto tag = [](Index i) { return "IC" + std::to_string(i); };

  if (in_support(0)) {
    for (Index i = 1; i <= n; ++i) {
      const auto k = static_cast<std::size_t>(i);
      out.ic.push_back({tag(i), d[k], in_support(i) ? Sense::Equal : Sense::LessEqual, c[k]});
    }
    return out;
  }
  // theta_0 is off the support: gains are compared with a reference r in it.
  Index r = 1;
  while (!in_support(r)) ++r;
  const auto rr = static_cast<std::size_t>(r);
  out.ic.push_back({tag(0), -d[rr], Sense::LessEqual, -c[rr]});
  for (Index i = 1; i <= n; ++i) {
    if (i == r) continue;
    const auto k = static_cast<std::size_t>(i);
    out.ic.push_back({tag(i), d[k] - d[rr], in_support(i) ? Sense::Equal : Sense::LessEqual,
                      c[k] - c[rr]});
  }
  return out;
}

bool implementable(const MoralHazardEnv& env, const FiniteExperiment& f, const TargetAction& t) {
  const auto c = build_constraints(env, f, t);
  const Index m = static_cast<Index>(f.signal_count());
  numerics::LinearProgram lp(static_cast<std::size_t>(m));
  for (auto& b : lp.variable_bounds) b = {env.u_lo, env.u_hi};
  add_rows(lp, c, m);
  return numerics::solve_lp(lp).status == numerics::LPStatus::Optimal;
}

SchemeSolution min_disutility(const MoralHazardEnv& env, const FiniteExperiment& f,
                              const TargetAction& t) {
  const auto c = build_constraints(env, f, t);
  const Index m = static_cast<Index>(f.signal_count());
  const VectorXd weights = f.matrix().transpose() * t.full();
  // Variables: w_0..w_{m-1}, z_0..z_{m-1} with z_j >= gamma(w_j).
  numerics::LinearProgram lp(static_cast<std::size_t>(2 * m));
  for (Index j = 0; j < m; ++j) {
    lp.variable_bounds[static_cast<std::size_t>(j)] = {env.u_lo, env.u_hi};
    lp.variable_bounds[static_cast<std::size_t>(m + j)] = {-kInf, kInf};
    lp.objective(m + j) = weights(j);
  }
  add_rows(lp, c, 2 * m);
  const auto& bp = env.gamma.breakpoints();
  const auto& gv = env.gamma.values();
  const auto slopes = env.gamma.slopes();
  for (Index j = 0; j < m; ++j) {
    if (slopes.empty()) {
      VectorXd row = VectorXd::Zero(2 * m);
      row(m + j) = -1.0;
      lp.add_less_equal(std::move(row), -gv[0]);
      continue;
    }
    for (std::size_t k = 0; k < slopes.size(); ++k) {
      // s w_j - z_j <= s w_k - gamma(w_k)
      VectorXd row = VectorXd::Zero(2 * m);
      row(j) = slopes[k];
      row(m + j) = -1.0;
      lp.add_less_equal(std::move(row), slopes[k] * bp[k] - gv[k]);
    }
  }
  const auto res = numerics::solve_lp(lp);
  SchemeSolution out;
  if (res.status != numerics::LPStatus::Optimal) return out;
  out.w = res.point.head(m);
  // Report the disutility of the scheme itself rather than the epigraph.
  double value = 0.0;
  for (Index j = 0; j < m; ++j) value += weights(j) * env.gamma(out.w(j));
  out.disutility = value;
  auto tight = [&](const ConstraintRow& r) {
    return r.sense == Sense::Equal || std::abs(r.coeffs.dot(out.w) - r.rhs) <= kBindingTolerance;
  };
  if (tight(c.ir)) out.binding.push_back(c.ir.tag);
  for (const auto& r : c.ic) {
    if (tight(r)) out.binding.push_back(r.tag);
  }
  return out;
}

double dual_value(const MoralHazardEnv& env, const FiniteExperiment& f, double lambda,
                  const VectorXd& mu) {
  if (f.state_count() != env.n() + 1 || static_cast<std::size_t>(mu.size()) != env.n()) {
    throw Error(ErrorCode::StateMismatch, "environment, experiment and multipliers disagree on n");
  }
  const auto ratios = likelihood_ratios(f, 0);
  const VectorXd f0 = f.matrix().row(0).transpose();
  double k = lambda * env.c0 - mu.dot(env.l);
  for (std::size_t j = 0; j < ratios.size(); ++j) {
    const double arg = lambda + mu.dot(VectorXd::Ones(mu.size()) - ratios[j]);
    k -= f0(static_cast<Index>(j)) * numerics::convex_conjugate(env.gamma, arg);
  }
  return k;
}

DualSolution dual_solve(const MoralHazardEnv& env, const FiniteExperiment& f) {
  if (f.state_count() != env.n() + 1) {
    throw Error(ErrorCode::StateMismatch, "environment and experiment disagree on n");
  }
  const auto ratios = likelihood_ratios(f, 0);
  const Index n = static_cast<Index>(env.n());
  const Index m = static_cast<Index>(f.signal_count());
  const VectorXd f0 = f.matrix().row(0).transpose();
  // Variables: lambda, mu_1..mu_n, z_0..z_{m-1} with z_j >= rho(t_j).
  const Index total = 1 + n + m;
  numerics::LinearProgram lp(static_cast<std::size_t>(total));
  lp.objective(0) = -env.c0;
  for (Index i = 0; i < n; ++i) lp.objective(1 + i) = env.l(i);
  for (Index j = 0; j < m; ++j) {
    lp.variable_bounds[static_cast<std::size_t>(1 + n + j)] = {-kInf, kInf};
    lp.objective(1 + n + j) = f0(j);
  }
  const auto& bp = env.gamma.breakpoints();
  const auto& gv = env.gamma.values();
  for (Index j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < bp.size(); ++k) {
      // w_k t_j - z_j <= gamma(w_k)
      VectorXd row = VectorXd::Zero(total);
      row(0) = bp[k];
      for (Index i = 0; i < n; ++i) {
        row(1 + i) = bp[k] * (1.0 - ratios[static_cast<std::size_t>(j)](i));
      }
      row(1 + n + j) = -1.0;
      lp.add_less_equal(std::move(row), gv[k]);
    }
  }
  const auto res = numerics::solve_lp(lp);
  DualSolution out;
  out.mu = VectorXd::Zero(n);
  if (res.status == numerics::LPStatus::Unbounded) {
    out.value = kInf;
    return out;
  }
  if (res.status != numerics::LPStatus::Optimal) {
    throw Error(ErrorCode::DegenerateInput, "dual program is infeasible");
  }
  out.lambda = std::max(res.point(0), 0.0);
  out.mu = res.point.segment(1, n).cwiseMax(0.0);
  out.value = dual_value(env, f, out.lambda, out.mu);
  return out;
}

std::pair<numerics::PiecewiseLinearConvex, std::pair<double, double>> build_gamma(
    const std::vector<double>& payments, const std::vector<double>& u_of_s,
    const std::vector<double>& v_of_s) {
  if (payments.empty() || payments.size() != u_of_s.size() || u_of_s.size() != v_of_s.size()) {
    throw Error(ErrorCode::DegenerateInput, "payment, utility and disutility grids must align");
  }
  std::vector<std::pair<double, double>> pts;
  pts.reserve(u_of_s.size());
  for (std::size_t s = 0; s < u_of_s.size(); ++s) pts.emplace_back(u_of_s[s], v_of_s[s]);
  auto gamma = numerics::lower_convex_hull(std::move(pts));
  const std::pair<double, double> bounds{gamma.lo(), gamma.hi()};
  return {std::move(gamma), bounds};
}

MoralHazardInstance converse_moral_hazard(const FiniteExperiment& g, const VectorXd& b) {
  if (b.size() != static_cast<Index>(g.state_count())) {
    throw Error(ErrorCode::DimensionMismatch, "direction length must equal the state count");
  }
  const VectorXd dir = b.sum() < 0.0 ? VectorXd(-b) : b;
  const Index states = dir.size();
  const Index n = states - 1;
  VectorXd z = VectorXd::Zero(states);
  for (Index y = 0; y < g.matrix().cols(); ++y) {
    if (dir.dot(g.matrix().col(y)) > 0.0) z += g.matrix().col(y);
  }
  const VectorXd delta = VectorXd::Constant(n, 1.0 / static_cast<double>(states));
  MoralHazardEnv env;
  env.u_lo = 0.0;
  env.u_hi = 1.0;
  env.Q = MatrixXd::Zero(n, n);
  env.l = z.tail(n) - VectorXd::Constant(n, z(0));
  env.c0 = z.mean() - env.l.dot(delta);
  env.gamma = numerics::PiecewiseLinearConvex::linear(0.0, 1.0, 1.0, 0.0);
  return {std::move(env), TargetAction(delta)};
}

}  // namespace infoorder
