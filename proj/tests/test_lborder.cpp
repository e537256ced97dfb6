#include <doctest.h>

#include <random>

#include "infoorder/error.hpp"
#include "infoorder/lborder.hpp"
#include "random_instances.hpp"

using namespace infoorder;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

FiniteExperiment identity(int n) { return FiniteExperiment::from_matrix(MatrixXd::Identity(n, n)); }

// Brute-force minimum of xi over a fine grid of the cube surface.
double grid_minimum(const FiniteExperiment& f, const FiniteExperiment& g, int steps) {
  const int d = static_cast<int>(f.state_count());
  double best = 1e300;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  const long total = static_cast<long>(std::pow(2 * steps + 1, d));
  for (long code = 0; code < total; ++code) {
    long c = code;
    VectorXd b(d);
    for (int i = 0; i < d; ++i) {
      b(i) = static_cast<double>(c % (2 * steps + 1) - steps) / steps;
      c /= (2 * steps + 1);
    }
    if (b.cwiseAbs().maxCoeff() < 1.0 - 1e-12) continue;
    best = std::min(best, support_diff(f, g, b));
  }
  return best;
}

}  // namespace

TEST_CASE("support_diff and zonoid_support examples") {
  testsupport::Rng rng(1);
  const auto f = testsupport::random_experiment(rng, 3, 4);
  const auto g = testsupport::random_experiment(rng, 3, 2);
  CHECK(support_diff(f, f, vec({0.3, -1.0, 0.2})) == doctest::Approx(0.0));
  CHECK(support_diff(f, g, vec({1.0, 1.0, 1.0})) == doctest::Approx(0.0));
  CHECK(support_diff(revealing_with_noise(2, 0.5), exclusion_experiment(2), vec({1, -1, 0})) ==
        doctest::Approx(0.0).epsilon(1e-12));

  CHECK(zonoid_support(f, vec({1, 1, 1})) == doctest::Approx(3.0));
  CHECK(zonoid_support(f, vec({1, 0, 0})) == doctest::Approx(1.0));
  CHECK(zonoid_support(exclusion_experiment(2), vec({1, -1, 0})) == doctest::Approx(0.5));
  CHECK_THROWS_AS(support_diff(f, identity(2), vec({1, 1, 1})), Error);
}

TEST_CASE("support_diff: homogeneity and sign symmetry") {
  testsupport::Rng rng(2);
  for (int k = 0; k < 100; ++k) {
    const int s = testsupport::uniform_int(rng, 2, 4);
    const auto f = testsupport::random_experiment(rng, s, 3, 0.2);
    const auto g = testsupport::random_experiment(rng, s, 4, 0.2);
    VectorXd b = VectorXd::NullaryExpr(s, [&]() { return testsupport::uniform(rng, -1, 1); });
    const double lam = testsupport::uniform(rng, 0.1, 5.0);
    CHECK(support_diff(f, g, lam * b) == doctest::Approx(lam * support_diff(f, g, b)).epsilon(1e-12));
    CHECK(support_diff(f, g, -b) == doctest::Approx(support_diff(f, g, b)).epsilon(1e-12));
  }
}

TEST_CASE("lb_exact examples") {
  CHECK(lb_exact(identity(3), exclusion_experiment(2)).holds);
  const auto half = lb_exact(revealing_with_noise(2, 0.5), exclusion_experiment(2));
  CHECK(half.holds);
  CHECK(half.method == OrderMethod::ExactRays);
  CHECK(half.margin >= -1e-9);

  const auto fails = lb_exact(exclusion_experiment(2), identity(3));
  CHECK_FALSE(fails.holds);
  REQUIRE(fails.witness);
  CHECK(support_diff(exclusion_experiment(2), identity(3), *fails.witness) ==
        doctest::Approx(fails.margin));
  CHECK(fails.margin <= -0.5);
  CHECK(fails.witness->cwiseAbs().maxCoeff() == doctest::Approx(1.0));
  // The direction quoted for this pair is a valid but non-minimal witness.
  CHECK(support_diff(exclusion_experiment(2), identity(3), vec({1, -1, 0})) == doctest::Approx(-0.5));
}

TEST_CASE("lb_exact verdict matches a brute-force cube scan") {
  testsupport::Rng rng(3);
  for (int k = 0; k < 30; ++k) {
    const int s = testsupport::uniform_int(rng, 2, 3);
    const auto f = testsupport::random_experiment(rng, s, testsupport::uniform_int(rng, 2, 4), 0.2);
    const auto g = testsupport::random_experiment(rng, s, testsupport::uniform_int(rng, 2, 4), 0.2);
    const auto v = lb_exact(f, g);
    const double grid = grid_minimum(f, g, 40);
    // Rays are scored under max-norm scaling; the verdict is scale free.
    if (v.holds) CHECK(grid >= -1e-9);
    if (grid < -1e-6) CHECK_FALSE(v.holds);
    if (!v.holds) CHECK(grid < 0.0);
  }
}

TEST_CASE("lb_exact: limits and mismatches") {
  RayLimits small;
  small.max_signals = 4;
  CHECK_THROWS_AS(lb_exact(identity(3), identity(3), small), Error);
  try {
    lb_exact(identity(7), identity(7));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionLimitExceeded);
  }
  try {
    lb_exact(identity(2), identity(3));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StateMismatch);
  }
}

TEST_CASE("lb_sampled") {
  testsupport::Rng rng(4);
  const auto f = testsupport::random_experiment(rng, 3, 3);
  const auto same = lb_sampled(f, f, 200);
  CHECK(same.holds);
  CHECK(same.margin == doctest::Approx(0.0));
  CHECK(same.method == OrderMethod::SampledHemisphere);

  const auto fails = lb_sampled(exclusion_experiment(2), identity(3), 500);
  CHECK_FALSE(fails.holds);
  REQUIRE(fails.witness);
  CHECK(fails.margin <= -0.4);
  CHECK(support_diff(exclusion_experiment(2), identity(3), *fails.witness) == doctest::Approx(fails.margin));
}

TEST_CASE("lb_sampled agrees with lb_exact on random 3-state pairs") {
  testsupport::Rng rng(5);
  int agree = 0;
  for (int k = 0; k < 200; ++k) {
    const auto f = testsupport::random_experiment(rng, 3, testsupport::uniform_int(rng, 2, 4), 0.2);
    const auto g = k % 2 == 0 ? apply_garbling(f, testsupport::random_garbling(rng, static_cast<int>(f.signal_count()), 3))
                              : testsupport::random_experiment(rng, 3, testsupport::uniform_int(rng, 2, 4), 0.2);
    const auto exact = lb_exact(f, g);
    const auto sampled = lb_sampled(f, g, 400, static_cast<std::uint64_t>(k));
    // A sampled failure is always a real failure.
    if (!sampled.holds) CHECK_FALSE(exact.holds);
    // Failures deeper than the sampling resolution are always found.
    if (exact.margin < -1e-3) CHECK_FALSE(sampled.holds);
    agree += exact.holds == sampled.holds;
  }
  CHECK(agree >= 195);
}

TEST_CASE("lb_sampled on grid experiments") {
  std::vector<double> grid;
  for (int k = 0; k <= 20; ++k) grid.push_back(k / 20.0);
  MatrixXd dens(2, 21);
  for (int k = 0; k <= 20; ++k) {
    dens(0, k) = 2.0 * (1.0 - grid[static_cast<std::size_t>(k)]);
    dens(1, k) = 2.0 * grid[static_cast<std::size_t>(k)];
  }
  const GridExperiment g{StateSpace::indexed(2), grid, dens, trapezoid_weights(grid)};
  CHECK(lb_sampled(identity(2), g, 100).holds);
  CHECK_FALSE(lb_sampled(g, identity(2), 100).holds);
}

TEST_CASE("is_quasi_monotone") {
  CHECK(is_quasi_monotone(vec({-1, 0, 2})));
  CHECK(is_quasi_monotone(vec({0, 0, 0})));
  CHECK_FALSE(is_quasi_monotone(vec({1, -1, 1})));
  CHECK(is_quasi_monotone(vec({1e-13, -1, 1})));
}

TEST_CASE("mpe_check examples") {
  const auto fe = revealing_with_noise(2, 0.5);
  CHECK(mpe_check(fe, exclusion_experiment(2)).holds);
  CHECK(mpe_check(fe, fe).holds);
  const auto v = mpe_check(exclusion_experiment(2), identity(3));
  CHECK_FALSE(v.holds);
  REQUIRE(v.witness);
  CHECK(is_quasi_monotone(*v.witness));
  CHECK(v.margin <= -0.5);
  CHECK(support_diff(exclusion_experiment(2), identity(3), *v.witness) == doctest::Approx(v.margin));
  CHECK(support_diff(exclusion_experiment(2), identity(3), vec({-1, 0, 1})) == doctest::Approx(-0.5));
}

TEST_CASE("MPE is weaker than LB and exact over quasi-monotone directions") {
  testsupport::Rng rng(6);
  for (int k = 0; k < 60; ++k) {
    const auto f = testsupport::random_experiment(rng, 3, testsupport::uniform_int(rng, 2, 4), 0.2);
    const auto g = testsupport::random_experiment(rng, 3, testsupport::uniform_int(rng, 2, 4), 0.2);
    const auto lb = lb_exact(f, g);
    const auto mpe = mpe_check(f, g);
    if (lb.holds) CHECK(mpe.holds);
    if (!mpe.holds) CHECK_FALSE(lb.holds);
    // Grid over quasi-monotone directions on the cube surface.
    double best = 1e300;
    for (int a = -20; a <= 20; ++a) {
      for (int b = -20; b <= 20; ++b) {
        for (int c = -20; c <= 20; ++c) {
          VectorXd d = vec({a / 20.0, b / 20.0, c / 20.0});
          if (d.cwiseAbs().maxCoeff() < 1.0 || !is_quasi_monotone(d)) continue;
          best = std::min(best, support_diff(f, g, d));
        }
      }
    }
    if (mpe.holds) CHECK(best >= -1e-9);
    if (best < -1e-6) CHECK_FALSE(mpe.holds);
  }
}

TEST_CASE("lb_via_relabelings") {
  testsupport::Rng rng(7);
  for (int k = 0; k < 40; ++k) {
    const auto f = testsupport::random_experiment(rng, 3, 3, 0.2);
    const auto g = testsupport::random_experiment(rng, 3, 3, 0.2);
    const auto lb = lb_exact(f, g);
    const auto rel = lb_via_relabelings(f, g);
    CHECK(lb.holds == rel.holds);
    if (!rel.holds) {
      REQUIRE(rel.witness);
      REQUIRE(rel.permutation);
      CHECK(support_diff(f, g, *rel.witness) == doctest::Approx(rel.margin));
    }
  }
  const auto a = testsupport::random_experiment(rng, 2, 3);
  const auto b = testsupport::random_experiment(rng, 2, 2);
  CHECK(lb_via_relabelings(a, b).holds == mpe_check(a, b).holds);
  CHECK(lb_via_relabelings(b, a).holds == mpe_check(b, a).holds);
  try {
    lb_via_relabelings(identity(8), identity(8));
    FAIL("expected TooManyStates");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooManyStates);
  }
}

TEST_CASE("blackwell_check examples") {
  testsupport::Rng rng(8);
  const auto g = testsupport::random_experiment(rng, 2, 3);
  const auto v = blackwell_check(identity(2), g);
  CHECK(v.holds);
  CHECK(v.method == OrderMethod::GarblingLP);
  REQUIRE(v.kernel);
  CHECK(v.kernel->isApprox(g.matrix(), 1e-7));

  CHECK_FALSE(blackwell_check(revealing_with_noise(2, 0.25), exclusion_experiment(2)).holds);
  for (int k = 0; k < 30; ++k) {
    auto [f, gg] = testsupport::garbled_pair(rng, testsupport::uniform_int(rng, 2, 4));
    const auto r = blackwell_check(f, gg);
    CHECK(r.holds);
    REQUIRE(r.kernel);
    CHECK((f.matrix() * *r.kernel - gg.matrix()).cwiseAbs().maxCoeff() <= 1e-7);
  }
}

TEST_CASE("Blackwell implies LB; binary states coincide") {
  testsupport::Rng rng(9);
  for (int k = 0; k < 200; ++k) {
    auto [f, g] = testsupport::garbled_pair(rng, testsupport::uniform_int(rng, 2, 4));
    CHECK(lb_exact(f, g).holds);
  }
  for (int k = 0; k < 200; ++k) {
    const auto f = testsupport::random_experiment(rng, 2, testsupport::uniform_int(rng, 1, 4), 0.2);
    const auto g = testsupport::random_experiment(rng, 2, testsupport::uniform_int(rng, 1, 4), 0.2);
    CHECK(lb_exact(f, g).holds == blackwell_check(f, g).holds);
  }
}

TEST_CASE("lb_equivalent") {
  testsupport::Rng rng(10);
  const auto f = testsupport::random_experiment(rng, 3, 3);
  MatrixXd split(3, 4);
  split << f.matrix().leftCols(2), 0.5 * f.matrix().col(2), 0.5 * f.matrix().col(2);
  CHECK(lb_equivalent(f, FiniteExperiment::from_matrix(split)));
  MatrixXd swapped = f.matrix().rowwise().reverse();
  CHECK(lb_equivalent(f, FiniteExperiment::from_matrix(swapped)));
  CHECK_FALSE(lb_equivalent(revealing_with_noise(2, 0.5), exclusion_experiment(2)));
  for (int k = 0; k < 40; ++k) {
    const auto a = testsupport::random_experiment(rng, 3, 2);
    const auto b = k % 2 ? a : testsupport::random_experiment(rng, 3, 2);
    CHECK(lb_equivalent(a, b) == (blackwell_check(a, b).holds && blackwell_check(b, a).holds));
  }
}

TEST_CASE("dichotomy_from_witness") {
  const auto d = dichotomy_from_witness(vec({1, -1, 0}));
  CHECK(d.omega0 == std::vector<std::size_t>{1, 2});
  CHECK(d.w0.isApprox(vec({1, 0})));
  CHECK(d.omega1 == std::vector<std::size_t>{0});
  CHECK(d.w1.isApprox(vec({1})));
  const auto e = dichotomy_from_witness(vec({-2, -2, 4}));
  CHECK(e.omega0 == std::vector<std::size_t>{0, 1});
  CHECK(e.w0.isApprox(vec({0.5, 0.5})));
  CHECK(e.omega1 == std::vector<std::size_t>{2});
  try {
    dichotomy_from_witness(vec({1, 1, 1}));
    FAIL("expected OneSignedWitness");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::OneSignedWitness);
  }
}

TEST_CASE("dichotomies: LB transfers to every reduction, witnesses break one") {
  testsupport::Rng rng(11);
  for (int k = 0; k < 30; ++k) {
    auto [f, g] = testsupport::garbled_pair(rng, 3);
    for (int r = 0; r < 10; ++r) {
      VectorXd w = testsupport::random_stochastic(rng, 1, 2).row(0).transpose();
      const WeightedDichotomy d{{0, 2}, {1}, w, vec({1.0})};
      CHECK(blackwell_check(dichotomy_reduce(f, d), dichotomy_reduce(g, d)).holds);
    }
  }
  for (int k = 0; k < 30; ++k) {
    auto [f, g] = testsupport::failing_pair(rng, 3);
    const auto d = dichotomy_from_witness(*lb_exact(f, g).witness);
    CHECK_FALSE(blackwell_check(dichotomy_reduce(f, d), dichotomy_reduce(g, d)).holds);
  }
}

TEST_CASE("irredundant dominating experiments are Blackwell-dominating") {
  testsupport::Rng rng(12);
  int checked = 0;
  for (int k = 0; k < 300 && checked < 40; ++k) {
    const auto f = testsupport::random_experiment(rng, 3, testsupport::uniform_int(rng, 2, 3));
    const auto g = testsupport::random_experiment(rng, 3, testsupport::uniform_int(rng, 2, 3));
    if (!is_irredundant(f) || !lb_exact(f, g).holds) continue;
    ++checked;
    CHECK(blackwell_check(f, g).holds);
  }
  CHECK(checked > 0);
}
