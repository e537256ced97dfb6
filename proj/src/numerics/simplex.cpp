#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "infoorder/error.hpp"
#include "infoorder/numerics.hpp"

namespace infoorder::numerics {

namespace {

std::atomic<double> g_feasibility_tol{1e-8};

constexpr double kPivotTol = 1e-9;
constexpr std::size_t kMaxIterations = 200000;

enum class VarKind { Shift, Reflect, Free };

struct VarMap {
  VarKind kind;
  std::size_t column;  // Free uses column and column + 1
  double offset;       // l for Shift, u for Reflect
};

struct StdRow {
  Eigen::VectorXd coeffs;
  bool is_equality;
  double rhs;
};

/// Dense tableau in canonical form for the current basis.
class Tableau {
 public:
  Tableau(Eigen::MatrixXd body, Eigen::VectorXd rhs, std::vector<std::size_t> basis)
      : body_(std::move(body)), rhs_(std::move(rhs)), basis_(std::move(basis)) {}

  std::size_t rows() const { return static_cast<std::size_t>(body_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(body_.cols()); }
  const std::vector<std::size_t>& basis() const { return basis_; }
  double rhs(std::size_t i) const { return rhs_(static_cast<Eigen::Index>(i)); }
  double at(std::size_t i, std::size_t j) const {
    return body_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  void pivot(std::size_t r, std::size_t c) {
    const auto ri = static_cast<Eigen::Index>(r);
    const auto ci = static_cast<Eigen::Index>(c);
    const double p = body_(ri, ci);
    body_.row(ri) /= p;
    rhs_(ri) /= p;
    for (Eigen::Index i = 0; i < body_.rows(); ++i) {
      if (i == ri) continue;
      const double f = body_(i, ci);
      if (f == 0.0) continue;
      body_.row(i) -= f * body_.row(ri);
      rhs_(i) -= f * rhs_(ri);
      if (std::abs(rhs_(i)) < 1e-14) rhs_(i) = 0.0;
    }
    basis_[r] = c;
  }

  void remove_row(std::size_t r) {
    const auto n = body_.rows();
    const auto ri = static_cast<Eigen::Index>(r);
    Eigen::MatrixXd body(n - 1, body_.cols());
    Eigen::VectorXd rhs(n - 1);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == ri) continue;
      body.row(k) = body_.row(i);
      rhs(k) = rhs_(i);
      ++k;
    }
    body_ = std::move(body);
    rhs_ = std::move(rhs);
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
  }

  void zero_rhs(std::size_t r) { rhs_(static_cast<Eigen::Index>(r)) = 0.0; }

 private:
  Eigen::MatrixXd body_;
  Eigen::VectorXd rhs_;
  std::vector<std::size_t> basis_;
};

enum class PhaseOutcome { Optimal, Unbounded };

/// Minimizes cost·y over the tableau's polyhedron with Bland's rule.
/// Columns with allowed[j] == false never enter the basis.
PhaseOutcome run_simplex(Tableau& t, const Eigen::VectorXd& cost,
                         const std::vector<bool>& allowed) {
  const std::size_t ncols = t.cols();
  Eigen::VectorXd reduced(static_cast<Eigen::Index>(ncols));
  for (std::size_t iter = 0; iter < kMaxIterations; ++iter) {
    for (std::size_t j = 0; j < ncols; ++j) {
      double d = cost(static_cast<Eigen::Index>(j));
      for (std::size_t i = 0; i < t.rows(); ++i) {
        d -= cost(static_cast<Eigen::Index>(t.basis()[i])) * t.at(i, j);
      }
      reduced(static_cast<Eigen::Index>(j)) = d;
    }
    std::size_t entering = ncols;
    for (std::size_t j = 0; j < ncols; ++j) {
      if (!allowed[j]) continue;
      if (reduced(static_cast<Eigen::Index>(j)) < -kReducedCostTolerance) {
        entering = j;
        break;
      }
    }
    if (entering == ncols) return PhaseOutcome::Optimal;

    std::size_t leaving = t.rows();
    double best_ratio = kInf;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      const double a = t.at(i, entering);
      if (a <= kPivotTol) continue;
      const double ratio = std::max(t.rhs(i), 0.0) / a;
      const double slack = 1e-12 * (1.0 + std::abs(best_ratio == kInf ? ratio : best_ratio));
      if (leaving == t.rows() || ratio < best_ratio - slack) {
        best_ratio = ratio;
        leaving = i;
      } else if (std::abs(ratio - best_ratio) <= slack &&
                 t.basis()[i] < t.basis()[leaving]) {
        leaving = i;
      }
    }
    if (leaving == t.rows()) return PhaseOutcome::Unbounded;
    t.pivot(leaving, entering);
  }
  throw Error(ErrorCode::MalformedProgram, "simplex iteration limit exceeded");
}

void check_well_formed(const LinearProgram& lp) {
  const auto n = static_cast<Eigen::Index>(lp.variable_count);
  if (lp.objective.size() != n) {
    throw Error(ErrorCode::MalformedProgram, "objective length mismatch");
  }
  if (lp.variable_bounds.size() != lp.variable_count) {
    throw Error(ErrorCode::MalformedProgram, "bounds length mismatch");
  }
  for (std::size_t i = 0; i < lp.equality_rows.size(); ++i) {
    if (lp.equality_rows[i].coeffs.size() != n) {
      throw Error(ErrorCode::MalformedProgram, "equality row length mismatch", i);
    }
  }
  for (std::size_t i = 0; i < lp.inequality_rows.size(); ++i) {
    if (lp.inequality_rows[i].coeffs.size() != n) {
      throw Error(ErrorCode::MalformedProgram, "inequality row length mismatch", i);
    }
  }
  for (std::size_t j = 0; j < lp.variable_count; ++j) {
    const auto& b = lp.variable_bounds[j];
    if (std::isnan(b.lower) || std::isnan(b.upper) || b.lower > b.upper ||
        b.lower == kInf || b.upper == -kInf) {
      throw Error(ErrorCode::MalformedProgram, "invalid variable bounds", j);
    }
  }
}

}  // namespace

double feasibility_tolerance() { return g_feasibility_tol.load(); }

void set_feasibility_tolerance(double tol) {
  if (!(tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  }
  g_feasibility_tol.store(tol);
}

LinearProgram::LinearProgram(std::size_t n)
    : variable_count(n),
      objective(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))),
      variable_bounds(n) {}

void LinearProgram::add_equality(Eigen::VectorXd coeffs, double rhs) {
  equality_rows.push_back({std::move(coeffs), rhs});
}

void LinearProgram::add_less_equal(Eigen::VectorXd coeffs, double rhs) {
  inequality_rows.push_back({std::move(coeffs), rhs});
}

void LinearProgram::add_greater_equal(const Eigen::VectorXd& coeffs, double rhs) {
  inequality_rows.push_back({-coeffs, -rhs});
}

double max_violation(const LinearProgram& lp, const Eigen::VectorXd& x) {
  double worst = 0.0;
  for (const auto& row : lp.equality_rows) {
    worst = std::max(worst, std::abs(row.coeffs.dot(x) - row.rhs));
  }
  for (const auto& row : lp.inequality_rows) {
    worst = std::max(worst, row.coeffs.dot(x) - row.rhs);
  }
  for (std::size_t j = 0; j < lp.variable_count; ++j) {
    const double v = x(static_cast<Eigen::Index>(j));
    worst = std::max(worst, lp.variable_bounds[j].lower - v);
    worst = std::max(worst, v - lp.variable_bounds[j].upper);
  }
  return worst;
}

LPResult solve_lp(const LinearProgram& lp) {
  check_well_formed(lp);
  const double feas_tol = feasibility_tolerance();

  // Substitute every variable by nonnegative standard-form columns.
  std::vector<VarMap> vars;
  vars.reserve(lp.variable_count);
  std::size_t nstruct = 0;
  for (const auto& b : lp.variable_bounds) {
    if (std::isfinite(b.lower)) {
      vars.push_back({VarKind::Shift, nstruct, b.lower});
      nstruct += 1;
    } else if (std::isfinite(b.upper)) {
      vars.push_back({VarKind::Reflect, nstruct, b.upper});
      nstruct += 1;
    } else {
      vars.push_back({VarKind::Free, nstruct, 0.0});
      nstruct += 2;
    }
  }

  std::vector<StdRow> rows;
  auto translate = [&](const LinearRow& row, bool eq) {
    StdRow out{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nstruct)), eq, row.rhs};
    for (std::size_t j = 0; j < lp.variable_count; ++j) {
      const double a = row.coeffs(static_cast<Eigen::Index>(j));
      if (a == 0.0) continue;
      const auto c = static_cast<Eigen::Index>(vars[j].column);
      switch (vars[j].kind) {
        case VarKind::Shift:
          out.coeffs(c) += a;
          out.rhs -= a * vars[j].offset;
          break;
        case VarKind::Reflect:
          out.coeffs(c) -= a;
          out.rhs -= a * vars[j].offset;
          break;
        case VarKind::Free:
          out.coeffs(c) += a;
          out.coeffs(c + 1) -= a;
          break;
      }
    }
    rows.push_back(std::move(out));
  };
  for (const auto& row : lp.equality_rows) translate(row, true);
  for (const auto& row : lp.inequality_rows) translate(row, false);
  for (std::size_t j = 0; j < lp.variable_count; ++j) {
    const auto& b = lp.variable_bounds[j];
    if (vars[j].kind == VarKind::Shift && std::isfinite(b.upper)) {
      StdRow r{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nstruct)), false,
               b.upper - b.lower};
      r.coeffs(static_cast<Eigen::Index>(vars[j].column)) = 1.0;
      rows.push_back(std::move(r));
    }
  }

  // Columns: structural | slacks | artificials.
  const std::size_t m = rows.size();
  std::size_t nslack = 0;
  for (const auto& r : rows) nslack += r.is_equality ? 0 : 1;
  std::vector<std::size_t> basis(m);
  std::vector<bool> needs_artificial(m, false);
  std::size_t nart = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i].is_equality || rows[i].rhs < 0.0) {
      needs_artificial[i] = true;
      ++nart;
    }
  }
  const std::size_t ncols = nstruct + nslack + nart;
  Eigen::MatrixXd body = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                               static_cast<Eigen::Index>(ncols));
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(m));
  std::size_t slack_col = nstruct;
  std::size_t art_col = nstruct + nslack;
  for (std::size_t i = 0; i < m; ++i) {
    const auto ri = static_cast<Eigen::Index>(i);
    body.row(ri).head(static_cast<Eigen::Index>(nstruct)) = rows[i].coeffs.transpose();
    rhs(ri) = rows[i].rhs;
    std::size_t my_slack = ncols;
    if (!rows[i].is_equality) {
      my_slack = slack_col++;
      body(ri, static_cast<Eigen::Index>(my_slack)) = 1.0;
    }
    if (rhs(ri) < 0.0) {
      body.row(ri) *= -1.0;
      rhs(ri) *= -1.0;
    }
    if (needs_artificial[i]) {
      body(ri, static_cast<Eigen::Index>(art_col)) = 1.0;
      basis[i] = art_col++;
    } else {
      basis[i] = my_slack;
    }
  }

  Tableau t(std::move(body), std::move(rhs), std::move(basis));
  const std::size_t first_art = nstruct + nslack;
  auto is_artificial = [&](std::size_t j) { return j >= first_art; };

  if (nart > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ncols));
    for (std::size_t j = first_art; j < ncols; ++j) phase1(static_cast<Eigen::Index>(j)) = 1.0;
    std::vector<bool> allowed(ncols, true);
    run_simplex(t, phase1, allowed);
    double infeasibility = 0.0;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      if (is_artificial(t.basis()[i])) infeasibility += std::max(t.rhs(i), 0.0);
    }
    if (infeasibility > feas_tol) return LPResult{LPStatus::Infeasible, 0.0, {}};

    // Drive zero-level artificials out of the basis; drop redundant rows.
    for (std::size_t i = 0; i < t.rows();) {
      if (!is_artificial(t.basis()[i])) {
        ++i;
        continue;
      }
      t.zero_rhs(i);
      std::size_t col = ncols;
      double best = kPivotTol;
      for (std::size_t j = 0; j < first_art; ++j) {
        if (std::abs(t.at(i, j)) > best) {
          best = std::abs(t.at(i, j));
          col = j;
        }
      }
      if (col == ncols) {
        t.remove_row(i);
      } else {
        t.pivot(i, col);
        ++i;
      }
    }
  }

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ncols));
  for (std::size_t j = 0; j < lp.variable_count; ++j) {
    const double c = lp.objective(static_cast<Eigen::Index>(j));
    const auto col = static_cast<Eigen::Index>(vars[j].column);
    switch (vars[j].kind) {
      case VarKind::Shift: cost(col) += c; break;
      case VarKind::Reflect: cost(col) -= c; break;
      case VarKind::Free:
        cost(col) += c;
        cost(col + 1) -= c;
        break;
    }
  }
  std::vector<bool> allowed(ncols, true);
  for (std::size_t j = first_art; j < ncols; ++j) allowed[j] = false;
  if (run_simplex(t, cost, allowed) == PhaseOutcome::Unbounded) {
    return LPResult{LPStatus::Unbounded, 0.0, {}};
  }

  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ncols));
  for (std::size_t i = 0; i < t.rows(); ++i) {
    y(static_cast<Eigen::Index>(t.basis()[i])) = std::max(t.rhs(i), 0.0);
  }
  Eigen::VectorXd x(static_cast<Eigen::Index>(lp.variable_count));
  for (std::size_t j = 0; j < lp.variable_count; ++j) {
    const auto col = static_cast<Eigen::Index>(vars[j].column);
    double v = 0.0;
    switch (vars[j].kind) {
      case VarKind::Shift: v = vars[j].offset + y(col); break;
      case VarKind::Reflect: v = vars[j].offset - y(col); break;
      case VarKind::Free: v = y(col) - y(col + 1); break;
    }
    const auto& b = lp.variable_bounds[j];
    x(static_cast<Eigen::Index>(j)) = std::clamp(v, b.lower, b.upper);
  }
  return LPResult{LPStatus::Optimal, lp.objective.dot(x), std::move(x)};
}

}  // namespace infoorder::numerics
