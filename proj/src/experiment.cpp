#include "infoorder/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "infoorder/error.hpp"

namespace infoorder {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

std::vector<std::string> numbered(const std::string& prefix, std::size_t count) {
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

void require_same_states(const FiniteExperiment& a, const FiniteExperiment& b) {
  if (a.state_count() != b.state_count()) {
    throw Error(ErrorCode::StateMismatch, "experiments have different state counts");
  }
}

}  // namespace

StateSpace::StateSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "a state space needs at least two states");
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!seen.insert(labels_[i]).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate state label '" + labels_[i] + "'", i);
    }
  }
}

StateSpace StateSpace::indexed(std::size_t count) { return StateSpace(numbered("t", count)); }

void validate_matrix(const Eigen::MatrixXd& matrix, double row_tol) {
  if (matrix.cols() == 0) throw Error(ErrorCode::EmptySignalSet, "no signals");
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      const double v = matrix(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw Error(ErrorCode::NegativeEntry,
                    "entry (" + std::to_string(i) + ", " + std::to_string(j) + ") = " +
                        std::to_string(v),
                    static_cast<std::size_t>(i));
      }
    }
    const double s = matrix.row(i).sum();
    if (std::abs(s - 1.0) > row_tol) {
      throw Error(ErrorCode::RowSumError, "row sums to " + std::to_string(s),
                  static_cast<std::size_t>(i));
    }
  }
}

FiniteExperiment::FiniteExperiment(StateSpace states, std::vector<std::string> signals,
                                   Eigen::MatrixXd matrix)
    : states_(std::move(states)), signals_(std::move(signals)), matrix_(std::move(matrix)) {
  if (signals_.empty()) throw Error(ErrorCode::EmptySignalSet, "no signals");
  if (matrix_.rows() != idx(states_.size()) || matrix_.cols() != idx(signals_.size())) {
    throw Error(ErrorCode::DimensionMismatch, "matrix shape does not match states x signals");
  }
  std::set<std::string> seen;
  for (std::size_t j = 0; j < signals_.size(); ++j) {
    if (!seen.insert(signals_[j]).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate signal label '" + signals_[j] + "'", j);
    }
  }
  validate_matrix(matrix_);
}

FiniteExperiment FiniteExperiment::from_matrix(Eigen::MatrixXd matrix,
                                               const std::string& signal_prefix) {
  auto states = StateSpace::indexed(static_cast<std::size_t>(matrix.rows()));
  auto signals = numbered(signal_prefix, static_cast<std::size_t>(matrix.cols()));
  return FiniteExperiment(std::move(states), std::move(signals), std::move(matrix));
}

void validate(const FiniteExperiment& f) { validate_matrix(f.matrix()); }

std::vector<double> trapezoid_weights(const std::vector<double>& grid) {
  const std::size_t m = grid.size();
  if (m < 2) throw Error(ErrorCode::DegenerateGrid, "trapezoid rule needs two points");
  std::vector<double> w(m, 0.0);
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const double h = grid[j + 1] - grid[j];
    if (!(h > 0.0)) throw Error(ErrorCode::DegenerateGrid, "grid not increasing", j + 1);
    w[j] += h / 2;
    w[j + 1] += h / 2;
  }
  return w;
}

Prior Prior::uniform(std::size_t n) {
  return Prior{Eigen::VectorXd::Constant(idx(n), 1.0 / static_cast<double>(n + 1))};
}

Eigen::VectorXd full_belief(const Eigen::VectorXd& p, double tol) {
  Eigen::VectorXd out(p.size() + 1);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p(i) >= -tol)) {
      throw Error(ErrorCode::BadBelief, "negative component", static_cast<std::size_t>(i) + 1);
    }
  }
  const double p0 = 1.0 - p.sum();
  if (p0 < -tol) throw Error(ErrorCode::BadBelief, "components sum above one", 0);
  out(0) = std::max(p0, 0.0);
  out.tail(p.size()) = p.cwiseMax(0.0);
  return out;
}

Eigen::VectorXd Prior::full() const { return full_belief(q); }

Eigen::VectorXd posterior(const FiniteExperiment& f, const Prior& q, std::size_t signal) {
  if (q.q.size() != idx(f.states().n())) {
    throw Error(ErrorCode::DimensionMismatch, "prior length must be n");
  }
  if (signal >= f.signal_count()) throw Error(ErrorCode::IndexError, "signal index", signal);
  const Eigen::VectorXd full = q.full();
  const Eigen::VectorXd joint = full.cwiseProduct(f.column(signal));
  const double marginal = joint.sum();
  if (!(marginal > 0.0)) {
    throw Error(ErrorCode::ZeroMarginal, "signal has zero probability under the prior", signal);
  }
  return joint.tail(joint.size() - 1) / marginal;
}

std::vector<Eigen::VectorXd> likelihood_ratios(const FiniteExperiment& f, std::size_t base) {
  if (base >= f.state_count()) throw Error(ErrorCode::IndexError, "base state", base);
  const auto& m = f.matrix();
  std::vector<Eigen::VectorXd> out;
  out.reserve(f.signal_count());
  for (std::size_t j = 0; j < f.signal_count(); ++j) {
    const double denom = m(idx(base), idx(j));
    if (!(denom > 0.0)) {
      throw Error(ErrorCode::ZeroBaseDensity, "baseline density vanishes at signal", j);
    }
    Eigen::VectorXd r(idx(f.state_count() - 1));
    Eigen::Index k = 0;
    for (std::size_t i = 0; i < f.state_count(); ++i) {
      if (i == base) continue;
      r(k++) = m(idx(i), idx(j)) / denom;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::pair<double, double>> posterior_mean_distribution(
    const FiniteExperiment& f, const Prior& q, const Eigen::VectorXd& phi) {
  if (phi.size() != idx(f.state_count())) {
    throw Error(ErrorCode::DimensionMismatch, "phi must have one entry per state");
  }
  const Eigen::VectorXd full = q.full();
  std::vector<std::pair<double, double>> atoms;
  for (std::size_t j = 0; j < f.signal_count(); ++j) {
    const Eigen::VectorXd joint = full.cwiseProduct(f.column(j));
    const double marginal = joint.sum();
    if (!(marginal > 0.0)) continue;
    atoms.emplace_back(joint.dot(phi) / marginal, marginal);
  }
  std::sort(atoms.begin(), atoms.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& a : atoms) {
    if (!merged.empty() && a.first - merged.back().first < 1e-12) {
      merged.back().second += a.second;
    } else {
      merged.push_back(a);
    }
  }
  return merged;
}

FiniteExperiment product(const FiniteExperiment& f1, const FiniteExperiment& f2) {
  require_same_states(f1, f2);
  const auto m1 = f1.signal_count();
  const auto m2 = f2.signal_count();
  Eigen::MatrixXd m(idx(f1.state_count()), idx(m1 * m2));
  std::vector<std::string> names;
  names.reserve(m1 * m2);
  for (std::size_t a = 0; a < m1; ++a) {
    for (std::size_t b = 0; b < m2; ++b) {
      m.col(idx(a * m2 + b)) = f1.matrix().col(idx(a)).cwiseProduct(f2.matrix().col(idx(b)));
      names.push_back(f1.signals()[a] + "*" + f2.signals()[b]);
    }
  }
  return FiniteExperiment(f1.states(), std::move(names), std::move(m));
}

FiniteExperiment mixture(const FiniteExperiment& f1, const FiniteExperiment& f2, double t) {
  require_same_states(f1, f2);
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::BadWeight, "mixture weight outside [0,1]");
  const auto m1 = f1.signal_count();
  const auto m2 = f2.signal_count();
  Eigen::MatrixXd m(idx(f1.state_count()), idx(m1 + m2));
  m.leftCols(idx(m1)) = t * f1.matrix();
  m.rightCols(idx(m2)) = (1.0 - t) * f2.matrix();
  std::vector<std::string> names;
  for (const auto& s : f1.signals()) names.push_back("L:" + s);
  for (const auto& s : f2.signals()) names.push_back("R:" + s);
  return FiniteExperiment(f1.states(), std::move(names), std::move(m));
}

void validate_dichotomy(const WeightedDichotomy& d, std::size_t state_count) {
  if (d.omega0.empty() || d.omega1.empty()) {
    throw Error(ErrorCode::BadDichotomy, "both sides must be nonempty");
  }
  if (d.w0.size() != idx(d.omega0.size()) || d.w1.size() != idx(d.omega1.size())) {
    throw Error(ErrorCode::BadDichotomy, "weight vector length mismatch");
  }
  std::vector<int> seen(state_count, 0);
  for (auto i : d.omega0) {
    if (i >= state_count) throw Error(ErrorCode::BadDichotomy, "state out of range", i);
    ++seen[i];
  }
  for (auto i : d.omega1) {
    if (i >= state_count) throw Error(ErrorCode::BadDichotomy, "state out of range", i);
    ++seen[i];
  }
  for (std::size_t i = 0; i < state_count; ++i) {
    if (seen[i] != 1) throw Error(ErrorCode::BadDichotomy, "sides must partition the states", i);
  }
  for (const auto* w : {&d.w0, &d.w1}) {
    if ((w->array() < 0.0).any() || std::abs(w->sum() - 1.0) > 1e-9) {
      throw Error(ErrorCode::BadDichotomy, "weights must be nonnegative and sum to one");
    }
  }
}

FiniteExperiment dichotomy_reduce(const FiniteExperiment& f, const WeightedDichotomy& d) {
  validate_dichotomy(d, f.state_count());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, idx(f.signal_count()));
  for (std::size_t k = 0; k < d.omega0.size(); ++k) {
    m.row(0) += d.w0(idx(k)) * f.matrix().row(idx(d.omega0[k]));
  }
  for (std::size_t k = 0; k < d.omega1.size(); ++k) {
    m.row(1) += d.w1(idx(k)) * f.matrix().row(idx(d.omega1[k]));
  }
  return FiniteExperiment(StateSpace({"omega0", "omega1"}), f.signals(), std::move(m));
}

FiniteExperiment relabel(const FiniteExperiment& f, const std::vector<std::size_t>& beta) {
  const auto n = f.state_count();
  if (beta.size() != n) throw Error(ErrorCode::NotAPermutation, "wrong length");
  std::vector<bool> hit(n, false);
  for (auto b : beta) {
    if (b >= n || hit[b]) throw Error(ErrorCode::NotAPermutation, "not a bijection", b);
    hit[b] = true;
  }
  Eigen::MatrixXd m(f.matrix().rows(), f.matrix().cols());
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    m.row(idx(i)) = f.matrix().row(idx(beta[i]));
    labels[i] = f.states().labels()[beta[i]];
  }
  return FiniteExperiment(StateSpace(std::move(labels)), f.signals(), std::move(m));
}

FiniteExperiment apply_garbling(const FiniteExperiment& f, const Garbling& k) {
  if (k.kernel.rows() != idx(f.signal_count())) {
    throw Error(ErrorCode::DimensionMismatch, "kernel rows must match the signal count");
  }
  try {
    validate_matrix(k.kernel);
  } catch (const Error& e) {
    throw Error(e.code(), std::string("garbling kernel: ") + e.what(), e.index());
  }
  Eigen::MatrixXd m = f.matrix() * k.kernel;
  auto names = numbered("y", static_cast<std::size_t>(m.cols()));
  return FiniteExperiment(f.states(), std::move(names), std::move(m));
}

bool is_irredundant(const FiniteExperiment& f) {
  const auto m = f.signal_count();
  if (m == 1) return true;
  Eigen::MatrixXd centered(f.matrix().rows(), idx(m - 1));
  for (std::size_t j = 1; j < m; ++j) centered.col(idx(j - 1)) = f.column(j) - f.column(0);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(centered);
  lu.setThreshold(1e-10);
  return static_cast<std::size_t>(lu.rank()) == m - 1;
}

double quadrature_residual(const GridExperiment& g) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < g.densities.rows(); ++i) {
    double mass = 0.0;
    for (std::size_t j = 0; j < g.weights.size(); ++j) mass += g.densities(i, idx(j)) * g.weights[j];
    worst = std::max(worst, std::abs(mass - 1.0));
  }
  return worst;
}

FiniteExperiment discretize(const GridExperiment& g) {
  const auto m = g.grid.size();
  if (m == 0 || g.weights.size() != m || g.densities.cols() != idx(m) ||
      g.densities.rows() != idx(g.states.size())) {
    throw Error(ErrorCode::DegenerateGrid, "grid, weights and densities disagree in size");
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!(g.weights[j] > 0.0)) throw Error(ErrorCode::DegenerateGrid, "nonpositive weight", j);
    if (j > 0 && !(g.grid[j] > g.grid[j - 1])) {
      throw Error(ErrorCode::DegenerateGrid, "grid not strictly increasing", j);
    }
  }
  if ((g.densities.array() < 0.0).any()) {
    throw Error(ErrorCode::DegenerateGrid, "negative density");
  }
  if (quadrature_residual(g) > 1e-6) {
    throw Error(ErrorCode::DegenerateGrid, "densities do not integrate to one within 1e-6");
  }
  Eigen::MatrixXd p(g.densities.rows(), idx(m));
  for (std::size_t j = 0; j < m; ++j) p.col(idx(j)) = g.densities.col(idx(j)) * g.weights[j];
  for (Eigen::Index i = 0; i < p.rows(); ++i) p.row(i) /= p.row(i).sum();
  std::vector<std::string> names;
  for (double x : g.grid) names.push_back("x=" + std::to_string(x));
  // Names from to_string may collide on very fine grids.
  std::set<std::string> uniq(names.begin(), names.end());
  if (uniq.size() != names.size()) names = numbered("x", m);
  return FiniteExperiment(g.states, std::move(names), std::move(p));
}

FiniteExperiment revealing_with_noise(std::size_t n, double eps) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(idx(n + 1), idx(n + 2));
  for (std::size_t i = 0; i <= n; ++i) {
    m(idx(i), idx(i)) = 1.0 - eps;
    m(idx(i), idx(n + 1)) = eps;
  }
  return FiniteExperiment::from_matrix(std::move(m));
}

FiniteExperiment exclusion_experiment(std::size_t n) {
  Eigen::MatrixXd m =
      Eigen::MatrixXd::Constant(idx(n + 1), idx(n + 1), 1.0 / static_cast<double>(n));
  m.diagonal().setZero();
  return FiniteExperiment::from_matrix(std::move(m), "y");
}

}  // namespace infoorder
