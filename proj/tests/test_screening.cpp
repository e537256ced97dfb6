#include <doctest.h>

#include <cmath>

#include "infoorder/error.hpp"
#include "infoorder/lborder.hpp"
#include "infoorder/screening.hpp"
#include "random_instances.hpp"

using namespace infoorder;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using numerics::PiecewiseLinearConvex;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

FiniteExperiment identity(int n) { return FiniteExperiment::from_matrix(MatrixXd::Identity(n, n)); }

// One type, two states, the type sure of theta_0.
ScreeningEnv single(int alternatives) {
  ScreeningEnv env;
  for (int a = 0; a < alternatives; ++a) env.alternatives.push_back("a" + std::to_string(a));
  env.types = {vec({0.0})};
  env.type_probs = vec({1.0});
  env.psi = VectorXd::Ones(alternatives);
  env.v1 = MatrixXd::Zero(alternatives, 2);
  env.u1 = MatrixXd::Zero(alternatives, 2);
  return env;
}

// Deterministic-rule cost LP written from the utility formula: per type r
// the transfers t(r, x) at its own alternative plus epigraph variables.
double oracle_cost(const ScreeningEnv& env, const FiniteExperiment& f, const AllocationRule& rule) {
  const Index types = static_cast<Index>(env.type_count());
  const Index cols = static_cast<Index>(f.signal_count()) + 1;
  const Index block = 2 * cols;
  numerics::LinearProgram lp(static_cast<std::size_t>(types * block));
  std::vector<VectorXd> belief;
  for (const auto& p : env.types) belief.push_back(full_belief(p));
  // Outcome distribution for a true type facing alternative a.
  auto outcome = [&](Index r, std::size_t a) {
    VectorXd o(cols);
    o.head(cols - 1) = env.psi(static_cast<Index>(a)) * (f.matrix().transpose() * belief[static_cast<std::size_t>(r)]);
    o(cols - 1) = 1.0 - env.psi(static_cast<Index>(a));
    return o;
  };
  double vmin = 1e300, vmax = -1e300;
  for (double v : env.v2.values()) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  const auto& bp = env.v2.breakpoints();
  const auto slopes = env.v2.slopes();
  for (Index r = 0; r < types; ++r) {
    const std::size_t a = rule.choice[static_cast<std::size_t>(r)];
    const VectorXd o = outcome(r, a);
    for (Index x = 0; x < cols; ++x) {
      lp.variable_bounds[static_cast<std::size_t>(r * block + x)] = {env.m_lo, env.m_hi};
      lp.variable_bounds[static_cast<std::size_t>(r * block + cols + x)] = {vmin - 1.0, vmax + 1.0};
      lp.objective(r * block + cols + x) = env.type_probs(r) * o(x);
      for (std::size_t k = 0; k < slopes.size(); ++k) {
        VectorXd row = VectorXd::Zero(types * block);
        row(r * block + x) = slopes[k];
        row(r * block + cols + x) = -1.0;
        lp.add_less_equal(row, slopes[k] * bp[k] - env.v2.values()[k]);
      }
    }
  }
  auto utility_row = [&](Index truth, Index report, double& constant) {
    const std::size_t a = rule.choice[static_cast<std::size_t>(report)];
    constant = env.u1.row(static_cast<Index>(a)).dot(belief[static_cast<std::size_t>(truth)]);
    VectorXd row = VectorXd::Zero(types * block);
    row.segment(report * block, cols) = outcome(truth, a);
    return row;
  };
  for (Index r = 0; r < types; ++r) {
    double c_rr = 0.0;
    const VectorXd own = utility_row(r, r, c_rr);
    lp.add_greater_equal(own, -c_rr);
    for (Index s = 0; s < types; ++s) {
      if (s == r) continue;
      double c_rs = 0.0;
      const VectorXd other = utility_row(r, s, c_rs);
      lp.add_greater_equal(own - other, c_rs - c_rr);
    }
  }
  const auto res = numerics::solve_lp(lp);
  return res.status == numerics::LPStatus::Optimal ? res.value : numerics::kInf;
}

AllocationRule random_choice(testsupport::Rng& rng, std::size_t types, std::size_t alts) {
  AllocationRule r;
  for (std::size_t t = 0; t < types; ++t) {
    r.choice.push_back(static_cast<std::size_t>(testsupport::uniform_int(rng, 0, static_cast<int>(alts) - 1)));
  }
  return r;
}

}  // namespace

TEST_CASE("interim_utility examples") {
  testsupport::Rng rng(41);
  auto env = single(1);
  env.psi = vec({0.0});
  env.u1 = (MatrixXd(1, 2) << 0.3, -0.2).finished();
  TransferRule t{{(MatrixXd(1, 3) << 0.9, 0.8, 0.25).finished()}};
  const AllocationRule rule{{0}};
  const auto f = testsupport::random_experiment(rng, 2, 2);
  CHECK(interim_utility(env, f, rule, t, 0, 0) == doctest::Approx(0.3 + 0.25));

  // Two types sure of different states; the transfer pays on the matching signal.
  ScreeningEnv two = single(1);
  two.types = {vec({0.0}), vec({1.0})};
  two.type_probs = vec({0.5, 0.5});
  two.u1 = (MatrixXd(1, 2) << 0.1, 0.2).finished();
  TransferRule pay{{(MatrixXd(1, 3) << 0.7, 0.0, 0.0).finished(), (MatrixXd(1, 3) << 0.0, 0.6, 0.0).finished()}};
  const AllocationRule both{{0, 0}};
  CHECK(interim_utility(two, identity(2), both, pay, 0, 0) == doctest::Approx(0.1 + 0.7));
  CHECK(interim_utility(two, identity(2), both, pay, 1, 1) == doctest::Approx(0.2 + 0.6));
  CHECK(interim_utility(two, identity(2), both, pay, 1, 0) == doctest::Approx(0.2));
  try {
    interim_utility(two, identity(2), both, pay, 2, 0);
    FAIL("expected IndexError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IndexError);
  }
}

TEST_CASE("implement_cost examples") {
  testsupport::Rng rng(42);
  const auto f = testsupport::random_experiment(rng, 2, 3);
  auto slack = single(2);
  slack.u1 = MatrixXd::Constant(2, 2, 0.2);
  const auto zero = implement_cost(slack, f, AllocationRule{{1}});
  REQUIRE(zero.feasible());
  CHECK(zero.cost == doctest::Approx(0.0));

  auto binds = single(1);
  binds.u1 = MatrixXd::Constant(1, 2, -1.0);
  const auto one = implement_cost(binds, f, AllocationRule{{0}});
  REQUIRE(one.feasible());
  CHECK(one.cost == doctest::Approx(1.0));

  binds.u1 = MatrixXd::Constant(1, 2, -2.0);
  CHECK_FALSE(implement_cost(binds, f, AllocationRule{{0}}).feasible());
  CHECK(std::isinf(implement_cost(binds, f, AllocationRule{{0}}).cost));
}

TEST_CASE("implement_cost matches an independently built LP") {
  testsupport::Rng rng(43);
  int feasible = 0;
  for (int k = 0; k < 150; ++k) {
    const int s = testsupport::uniform_int(rng, 2, 3);
    const auto env = testsupport::random_screening_env(rng, s, testsupport::uniform_int(rng, 1, 3),
                                                       testsupport::uniform_int(rng, 1, 3));
    const auto f = testsupport::random_experiment(rng, s, testsupport::uniform_int(rng, 1, 3), 0.2);
    const auto rule = random_choice(rng, env.type_count(), env.alternative_count());
    const auto sol = implement_cost(env, f, rule);
    const double oracle = oracle_cost(env, f, rule);
    CHECK(sol.feasible() == std::isfinite(oracle));
    if (!sol.feasible()) continue;
    ++feasible;
    CHECK(sol.cost == doctest::Approx(oracle).epsilon(1e-7));
    // The returned transfers satisfy IR and IC.
    for (std::size_t r = 0; r < env.type_count(); ++r) {
      const double own = interim_utility(env, f, rule, sol.transfers, r, r);
      CHECK(own >= -1e-8);
      for (std::size_t q = 0; q < env.type_count(); ++q) {
        CHECK(own >= interim_utility(env, f, rule, sol.transfers, r, q) - 1e-8);
      }
      for (const auto& m : sol.transfers.t) {
        CHECK(m.minCoeff() >= env.m_lo - 1e-9);
        CHECK(m.maxCoeff() <= env.m_hi + 1e-9);
      }
    }
  }
  CHECK(feasible > 30);
}

TEST_CASE("deterministic and randomized forms agree") {
  testsupport::Rng rng(44);
  for (int k = 0; k < 50; ++k) {
    const auto env = testsupport::random_screening_env(rng, 3, 2, 3);
    const auto f = testsupport::random_experiment(rng, 3, 3);
    const auto rule = random_choice(rng, 2, 3);
    const auto a = implement_cost(env, f, rule);
    const auto b = implement_cost(env, f, to_randomized(rule, 3));
    CHECK(a.feasible() == b.feasible());
    if (a.feasible()) CHECK(a.cost == doctest::Approx(b.cost).epsilon(1e-9));
  }
}

TEST_CASE("optimal_mechanism examples") {
  testsupport::Rng rng(45);
  const auto f = testsupport::random_experiment(rng, 2, 2);
  auto env = single(2);
  env.v1 = (MatrixXd(2, 2) << 0, 0, 1, 1).finished();
  env.u1 = MatrixXd::Constant(2, 2, 0.1);
  const auto best = optimal_mechanism(env, f);
  REQUIRE(best.feasible);
  CHECK(best.value == doctest::Approx(1.0));
  CHECK(best.rule.choice == std::vector<std::size_t>{1});
  CHECK(best.transfers.t[0].row(1).cwiseAbs().maxCoeff() <= 1e-9);

  env.u1 = MatrixXd::Constant(2, 2, -2.0);
  const auto none = optimal_mechanism(env, f);
  CHECK_FALSE(none.feasible);
  CHECK(std::isinf(none.value));
  CHECK(none.value < 0.0);

  for (int k = 0; k < 30; ++k) {
    auto e = testsupport::random_screening_env(rng, 2, 2, 2);
    e.v1.setZero();
    const auto g = testsupport::random_experiment(rng, 2, 2);
    const auto r = optimal_mechanism(e, g);
    double cheapest = numerics::kInf;
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t b = 0; b < 2; ++b) cheapest = std::min(cheapest, implement_cost(e, g, AllocationRule{{a, b}}).cost);
    }
    if (std::isinf(cheapest)) {
      CHECK_FALSE(r.feasible);
    } else {
      CHECK(r.value == doctest::Approx(-cheapest).epsilon(1e-9));
    }
  }

  auto big = testsupport::random_screening_env(rng, 2, 7, 4);
  try {
    optimal_mechanism(big, f);
    FAIL("expected EnumerationLimit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EnumerationLimit);
  }
}

TEST_CASE("signal-free alternatives make the experiment irrelevant") {
  testsupport::Rng rng(46);
  for (int k = 0; k < 40; ++k) {
    auto env = testsupport::random_screening_env(rng, 3, 2, 2);
    env.psi.setZero();
    const auto f = testsupport::random_experiment(rng, 3, 2);
    const auto g = testsupport::random_experiment(rng, 3, 4);
    const auto rule = random_choice(rng, 2, 2);
    const auto a = implement_cost(env, f, rule);
    const auto b = implement_cost(env, g, rule);
    CHECK(a.feasible() == b.feasible());
    if (a.feasible()) CHECK(a.cost == doctest::Approx(b.cost).epsilon(1e-9));
  }
}

TEST_CASE("garbling raises implementation cost and lowers the principal's value") {
  testsupport::Rng rng(47);
  for (int k = 0; k < 60; ++k) {
    const int s = testsupport::uniform_int(rng, 2, 3);
    auto [f, g] = testsupport::garbled_pair(rng, s);
    const auto env = testsupport::random_screening_env(rng, s, 2, 2);
    for (int r = 0; r < 4; ++r) {
      const auto rule = testsupport::random_rule(rng, 2, 2, r % 2 == 0);
      CHECK(implement_cost(env, f, rule).cost <= implement_cost(env, g, rule).cost + 1e-8);
    }
    CHECK(optimal_mechanism(env, f).value >= optimal_mechanism(env, g).value - 1e-8);
  }
}

TEST_CASE("converse construction separates failing pairs") {
  testsupport::Rng rng(48);
  for (int k = 0; k < 40; ++k) {
    const int s = testsupport::uniform_int(rng, 2, 4);
    auto [f, g] = testsupport::failing_pair(rng, s);
    const auto inst = converse_screening(g, *lb_exact(f, g).witness);
    CHECK(inst.env.type_count() == 2);
    CHECK(implement_cost(inst.env, g, inst.rule).feasible());
    CHECK_FALSE(implement_cost(inst.env, f, inst.rule).feasible());
  }
}

TEST_CASE("environment validation") {
  auto env = single(2);
  env.psi = vec({0.5, 1.5});
  CHECK_THROWS_AS(validate_env(env, 2), Error);
  env = single(2);
  env.type_probs = vec({0.7});
  CHECK_THROWS_AS(validate_env(env, 2), Error);
  env = single(2);
  env.types = {vec({1.2})};
  CHECK_THROWS_AS(validate_env(env, 2), Error);
  env = single(2);
  CHECK_THROWS_AS(validate_env(env, 3), Error);
}
