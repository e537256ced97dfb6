#include "infoorder/lborder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "infoorder/error.hpp"
#include "infoorder/numerics.hpp"

namespace infoorder {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kZeroEntry = 1e-12;
constexpr double kTieTolerance = 1e-12;

void require_same_states(const FiniteExperiment& f, const FiniteExperiment& g) {
  if (f.state_count() != g.state_count()) {
    throw Error(ErrorCode::StateMismatch, "experiments live on different state spaces");
  }
}

void require_direction(const FiniteExperiment& f, const VectorXd& b) {
  if (b.size() != static_cast<Index>(f.state_count())) {
    throw Error(ErrorCode::DimensionMismatch, "direction length must equal the state count");
  }
}

double xi(const MatrixXd& mf, const MatrixXd& mg, const VectorXd& b) {
  return (mf.transpose() * b).cwiseMax(0.0).sum() - (mg.transpose() * b).cwiseMax(0.0).sum();
}

// Scale to max |b_i| = 1, flush tiny entries, first nonzero entry positive.
bool canonicalize(VectorXd& b) {
  const double scale = b.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return false;
  b /= scale;
  for (Index i = 0; i < b.size(); ++i) {
    if (std::abs(b(i)) < kZeroEntry) b(i) = 0.0;
  }
  for (Index i = 0; i < b.size(); ++i) {
    if (b(i) != 0.0) {
      if (b(i) < 0.0) b = -b;
      break;
    }
  }
  b.array() += 0.0;  // drop negative zeros
  return true;
}

bool lex_less(const VectorXd& a, const VectorXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                      b.data() + b.size());
}

// Unit normals, deduplicated up to sign.
std::vector<VectorXd> collect_normals(const std::vector<const MatrixXd*>& sources,
                                      bool add_coordinates, Index dim) {
  std::vector<VectorXd> out;
  auto push = [&](VectorXd v) {
    const double norm = v.norm();
    if (norm < kZeroEntry) return;
    v /= norm;
    for (Index i = 0; i < v.size(); ++i) {
      if (std::abs(v(i)) > kZeroEntry) {
        if (v(i) < 0.0) v = -v;
        break;
      }
    }
    for (const auto& w : out) {
      if ((w - v).cwiseAbs().maxCoeff() < 1e-12) return;
    }
    out.push_back(std::move(v));
  };
  for (const auto* m : sources) {
    for (Index j = 0; j < m->cols(); ++j) push(m->col(j));
  }
  if (add_coordinates) {
    for (Index i = 0; i < dim; ++i) push(VectorXd::Unit(dim, i));
  }
  return out;
}

// Calls visit(b) for every extreme ray of the arrangement {b . v = 0},
// taken inside the span of the normals (xi is constant along the
// orthogonal complement).
template <class Visit>
void enumerate_rays(const std::vector<VectorXd>& normals, Index dim, Visit&& visit) {
  if (normals.empty()) return;
  MatrixXd n(dim, static_cast<Index>(normals.size()));
  for (std::size_t j = 0; j < normals.size(); ++j) n.col(static_cast<Index>(j)) = normals[j];

  Eigen::JacobiSVD<MatrixXd> svd(n, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Index rank = 0;
  for (Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > 1e-10 * std::max(1.0, sv(0))) ++rank;
  }
  if (rank == 0) return;
  const MatrixXd basis = svd.matrixU().leftCols(rank);
  if (rank == 1) {
    VectorXd b = basis.col(0);
    if (canonicalize(b)) visit(b);
    return;
  }
  const MatrixXd projected = basis.transpose() * n;  // rank x m
  const Index m = projected.cols();
  const Index k = rank - 1;
  if (m < k) return;

  std::vector<Index> pick(static_cast<std::size_t>(k));
  std::iota(pick.begin(), pick.end(), 0);
  MatrixXd a(k, rank);
  MatrixXd minor(k, k);
  VectorXd v(rank);
  while (true) {
    for (Index r = 0; r < k; ++r) a.row(r) = projected.col(pick[static_cast<std::size_t>(r)]).transpose();
    for (Index c = 0; c < rank; ++c) {
      for (Index cc = 0, col = 0; cc < rank; ++cc) {
        if (cc == c) continue;
        minor.col(col++) = a.col(cc);
      }
      const double det = k == 0 ? 1.0 : minor.determinant();
      v(c) = (c % 2 == 0) ? det : -det;
    }
    if (v.norm() > 1e-10) {
      VectorXd b = basis * v;
      if (canonicalize(b)) visit(b);
    }
    // Next k-subset of {0..m-1}.
    Index pos = k - 1;
    while (pos >= 0 && pick[static_cast<std::size_t>(pos)] == m - k + pos) --pos;
    if (pos < 0) break;
    ++pick[static_cast<std::size_t>(pos)];
    for (Index r = pos + 1; r < k; ++r) {
      pick[static_cast<std::size_t>(r)] = pick[static_cast<std::size_t>(r - 1)] + 1;
    }
  }
}

void check_limits(const FiniteExperiment& f, const FiniteExperiment& g, const RayLimits& limits) {
  const auto signals = f.signal_count() + g.signal_count();
  if (signals > limits.max_signals) {
    throw Error(ErrorCode::DimensionLimitExceeded,
                "combined signal count " + std::to_string(signals) + " exceeds " +
                    std::to_string(limits.max_signals));
  }
  if (f.state_count() > limits.max_states) {
    throw Error(ErrorCode::DimensionLimitExceeded,
                "state count " + std::to_string(f.state_count()) + " exceeds " +
                    std::to_string(limits.max_states));
  }
}

struct Best {
  double value = numerics::kInf;
  VectorXd b;

  void offer(double v, const VectorXd& cand) {
    if (v < value - kTieTolerance) {
      value = v;
      b = cand;
    } else if (std::abs(v - value) <= kTieTolerance && lex_less(cand, b)) {
      value = std::min(v, value);
      b = cand;
    }
  }
};

OrderVerdict ray_verdict(const FiniteExperiment& f, const FiniteExperiment& g,
                         const RayLimits& limits, bool monotone_only) {
  require_same_states(f, g);
  check_limits(f, g, limits);
  const MatrixXd& mf = f.matrix();
  const MatrixXd& mg = g.matrix();
  const Index dim = static_cast<Index>(f.state_count());
  const auto normals = collect_normals({&mf, &mg}, monotone_only, dim);

  Best best;
  enumerate_rays(normals, dim, [&](const VectorXd& b) {
    if (!monotone_only) {
      best.offer(xi(mf, mg, b), b);
      return;
    }
    VectorXd neg = -b;
    neg.array() += 0.0;
    if (is_quasi_monotone(neg)) {
      best.offer(xi(mf, mg, neg), neg);
    } else if (is_quasi_monotone(b)) {
      best.offer(xi(mf, mg, b), b);
    }
  });

  OrderVerdict v;
  v.method = OrderMethod::ExactRays;
  if (!std::isfinite(best.value)) {
    v.holds = true;
    v.margin = 0.0;
    return v;
  }
  v.margin = best.value;
  v.holds = best.value >= -kMarginTolerance;
  v.witness = best.b;
  return v;
}

VectorXd unit_hemisphere_point(std::mt19937_64& rng, Index dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd b(dim);
  do {
    for (Index i = 0; i < dim; ++i) b(i) = gauss(rng);
  } while (b.norm() < 1e-12);
  b.normalize();
  if (b(0) < 0.0) b = -b;
  return b;
}

}  // namespace

std::string_view to_string(OrderMethod m) {
  switch (m) {
    case OrderMethod::ExactRays: return "ExactRays";
    case OrderMethod::SampledHemisphere: return "SampledHemisphere";
    case OrderMethod::GarblingLP: return "GarblingLP";
  }
  return "Unknown";
}

double support_diff(const FiniteExperiment& f, const FiniteExperiment& g, const VectorXd& b) {
  require_same_states(f, g);
  require_direction(f, b);
  return xi(f.matrix(), g.matrix(), b);
}

double zonoid_support(const FiniteExperiment& f, const VectorXd& b) {
  require_direction(f, b);
  return (f.matrix().transpose() * b).cwiseMax(0.0).sum();
}

OrderVerdict lb_exact(const FiniteExperiment& f, const FiniteExperiment& g,
                      const RayLimits& limits) {
  return ray_verdict(f, g, limits, false);
}

OrderVerdict mpe_check(const FiniteExperiment& f, const FiniteExperiment& g,
                       const RayLimits& limits) {
  return ray_verdict(f, g, limits, true);
}

bool is_quasi_monotone(const VectorXd& b) {
  bool seen_positive = false;
  for (Index i = 0; i < b.size(); ++i) {
    const double v = std::abs(b(i)) < kZeroEntry ? 0.0 : b(i);
    if (v > 0.0) seen_positive = true;
    if (v < 0.0 && seen_positive) return false;
  }
  return true;
}

OrderVerdict lb_sampled(const FiniteExperiment& f, const FiniteExperiment& g,
                        std::size_t resolution, std::uint64_t seed) {
  require_same_states(f, g);
  const MatrixXd& mf = f.matrix();
  const MatrixXd& mg = g.matrix();
  const Index dim = static_cast<Index>(f.state_count());
  std::mt19937_64 rng(seed);

  std::vector<std::pair<double, VectorXd>> samples;
  samples.reserve(resolution);
  for (std::size_t s = 0; s < resolution; ++s) {
    VectorXd b = unit_hemisphere_point(rng, dim);
    samples.emplace_back(xi(mf, mg, b), std::move(b));
  }
  constexpr std::size_t kRefine = 16;
  const std::size_t keep = std::min(kRefine, samples.size());
  std::partial_sort(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(keep),
                    samples.end(), [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first < b.first;
                      return lex_less(a.second, b.second);
                    });

  double best = numerics::kInf;
  VectorXd best_b;
  for (std::size_t s = 0; s < keep; ++s) {
    VectorXd b = samples[s].second;
    double val = samples[s].first;
    for (double step = 0.1; step > 1e-7; step /= 2) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (Index i = 0; i < dim; ++i) {
          for (double sign : {1.0, -1.0}) {
            VectorXd cand = b;
            cand(i) += sign * step;
            if (cand.norm() < 1e-12) continue;
            cand.normalize();
            const double cv = xi(mf, mg, cand);
            if (cv < val - 1e-15) {
              b = std::move(cand);
              val = cv;
              improved = true;
            }
          }
        }
      }
    }
    if (val < best) {
      best = val;
      best_b = b;
    }
  }

  OrderVerdict v;
  v.method = OrderMethod::SampledHemisphere;
  if (keep == 0) {
    v.holds = true;
    return v;
  }
  if (best_b(0) < 0.0) best_b = -best_b;
  v.margin = best;
  v.holds = best >= -kMarginTolerance;
  v.witness = best_b;
  return v;
}

OrderVerdict lb_sampled(const GridExperiment& f, const GridExperiment& g,
                        std::size_t resolution, std::uint64_t seed) {
  return lb_sampled(discretize(f), discretize(g), resolution, seed);
}

OrderVerdict lb_sampled(const FiniteExperiment& f, const GridExperiment& g,
                        std::size_t resolution, std::uint64_t seed) {
  return lb_sampled(f, discretize(g), resolution, seed);
}

OrderVerdict lb_sampled(const GridExperiment& f, const FiniteExperiment& g,
                        std::size_t resolution, std::uint64_t seed) {
  return lb_sampled(discretize(f), g, resolution, seed);
}

OrderVerdict lb_via_relabelings(const FiniteExperiment& f, const FiniteExperiment& g) {
  require_same_states(f, g);
  const std::size_t states = f.state_count();
  if (states > 7) {
    throw Error(ErrorCode::TooManyStates, "relabeling check is limited to 7 states");
  }
  RayLimits limits;
  limits.max_states = 7;

  std::vector<std::size_t> beta(states);
  std::iota(beta.begin(), beta.end(), 0);
  OrderVerdict worst;
  worst.holds = true;
  worst.margin = numerics::kInf;
  do {
    OrderVerdict v = mpe_check(relabel(f, beta), relabel(g, beta), limits);
    if (v.witness) {
      // Back to the original state indices.
      VectorXd b(v.witness->size());
      for (std::size_t i = 0; i < states; ++i) {
        b(static_cast<Index>(beta[i])) = (*v.witness)(static_cast<Index>(i));
      }
      v.witness = b;
    }
    v.permutation = beta;
    if (!v.holds) return v;
    if (v.margin < worst.margin) worst = v;
  } while (std::next_permutation(beta.begin(), beta.end()));
  if (!std::isfinite(worst.margin)) worst.margin = 0.0;
  worst.permutation.reset();
  return worst;
}

OrderVerdict blackwell_check(const FiniteExperiment& f, const FiniteExperiment& g) {
  require_same_states(f, g);
  const Index states = static_cast<Index>(f.state_count());
  const Index mf = static_cast<Index>(f.signal_count());
  const Index mg = static_cast<Index>(g.signal_count());
  const Index nvar = mf * mg + 1;
  const Index t = nvar - 1;
  auto var = [mg](Index j, Index k) { return j * mg + k; };

  numerics::LinearProgram lp(static_cast<std::size_t>(nvar));
  lp.objective(t) = 1.0;
  for (Index j = 0; j < mf; ++j) {
    VectorXd row = VectorXd::Zero(nvar);
    for (Index k = 0; k < mg; ++k) row(var(j, k)) = 1.0;
    lp.add_equality(std::move(row), 1.0);
  }
  for (Index i = 0; i < states; ++i) {
    for (Index k = 0; k < mg; ++k) {
      VectorXd row = VectorXd::Zero(nvar);
      for (Index j = 0; j < mf; ++j) row(var(j, k)) = f.matrix()(i, j);
      const double target = g.matrix()(i, k);
      VectorXd up = row;
      up(t) = -1.0;
      lp.add_less_equal(std::move(up), target);
      VectorXd down = -row;
      down(t) = -1.0;
      lp.add_less_equal(std::move(down), -target);
    }
  }
  const auto res = numerics::solve_lp(lp);
  OrderVerdict v;
  v.method = OrderMethod::GarblingLP;
  if (res.status != numerics::LPStatus::Optimal) {
    // Cannot happen for a well-formed pair; report as failing.
    v.holds = false;
    v.margin = -numerics::kInf;
    return v;
  }
  const double residual = std::max(res.value, 0.0);
  v.margin = -residual;
  v.holds = residual <= numerics::feasibility_tolerance();
  if (v.holds) {
    MatrixXd k(mf, mg);
    for (Index j = 0; j < mf; ++j) {
      for (Index c = 0; c < mg; ++c) k(j, c) = std::max(res.point(var(j, c)), 0.0);
      k.row(j) /= k.row(j).sum();
    }
    v.kernel = std::move(k);
  }
  return v;
}

bool lb_equivalent(const FiniteExperiment& f, const FiniteExperiment& g) {
  return lb_exact(f, g).holds && lb_exact(g, f).holds;
}

WeightedDichotomy dichotomy_from_witness(const VectorXd& b) {
  bool has_pos = false;
  bool has_neg = false;
  for (Index i = 0; i < b.size(); ++i) {
    has_pos = has_pos || b(i) > 0.0;
    has_neg = has_neg || b(i) < 0.0;
  }
  if (!has_pos || !has_neg) {
    throw Error(ErrorCode::OneSignedWitness, "witness needs a positive and a negative entry");
  }
  WeightedDichotomy d;
  double b0 = 0.0;
  double b1 = 0.0;
  for (Index i = 0; i < b.size(); ++i) {
    if (b(i) > 0.0) {
      d.omega1.push_back(static_cast<std::size_t>(i));
      b1 += b(i);
    } else {
      d.omega0.push_back(static_cast<std::size_t>(i));
      b0 += b(i);
    }
  }
  d.w0.resize(static_cast<Index>(d.omega0.size()));
  d.w1.resize(static_cast<Index>(d.omega1.size()));
  for (std::size_t k = 0; k < d.omega0.size(); ++k) {
    d.w0(static_cast<Index>(k)) = b(static_cast<Index>(d.omega0[k])) / b0;
  }
  for (std::size_t k = 0; k < d.omega1.size(); ++k) {
    d.w1(static_cast<Index>(k)) = b(static_cast<Index>(d.omega1[k])) / b1;
  }
  return d;
}

}  // namespace infoorder
