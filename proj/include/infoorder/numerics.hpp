#pragma once

#include <Eigen/Dense>

#include <limits>
#include <utility>
#include <vector>

namespace infoorder::numerics {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Process-wide feasibility tolerance used by the LP solver and every
/// feasibility verdict built on it. Defaults to 1e-8.
double feasibility_tolerance();
void set_feasibility_tolerance(double tol);

inline constexpr double kReducedCostTolerance = 1e-9;

struct VariableBounds {
  double lower = 0.0;
  double upper = kInf;
};

struct LinearRow {
  Eigen::VectorXd coeffs;
  double rhs = 0.0;
};

/// minimize objective·x subject to equality rows, `row·x <= rhs` rows and
/// per-variable bounds. Use the add_* helpers to keep row lengths right.
struct LinearProgram {
  std::size_t variable_count = 0;
  Eigen::VectorXd objective;
  std::vector<LinearRow> equality_rows;
  std::vector<LinearRow> inequality_rows;
  std::vector<VariableBounds> variable_bounds;

  explicit LinearProgram(std::size_t n = 0);

  void add_equality(Eigen::VectorXd coeffs, double rhs);
  void add_less_equal(Eigen::VectorXd coeffs, double rhs);
  void add_greater_equal(const Eigen::VectorXd& coeffs, double rhs);
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

struct LPResult {
  LPStatus status = LPStatus::Infeasible;
  double value = 0.0;       // meaningful iff Optimal
  Eigen::VectorXd point;    // meaningful iff Optimal
};

/// Dense two-phase primal simplex with Bland's anti-cycling rule.
/// Throws Error(MalformedProgram) on inconsistent dimensions or bounds.
LPResult solve_lp(const LinearProgram& lp);

/// Largest constraint or bound violation of `x` (0 when feasible).
double max_violation(const LinearProgram& lp, const Eigen::VectorXd& x);

/// Convex piecewise-linear function given by its breakpoints. Evaluation
/// outside [lo, hi] extends the first and last pieces linearly.
class PiecewiseLinearConvex {
 public:
  PiecewiseLinearConvex(std::vector<double> breakpoints,
                        std::vector<double> values);

  static PiecewiseLinearConvex constant(double lo, double hi, double value);
  static PiecewiseLinearConvex linear(double lo, double hi, double slope,
                                      double intercept);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  double lo() const { return breakpoints_.front(); }
  double hi() const { return breakpoints_.back(); }
  std::size_t size() const { return breakpoints_.size(); }

  /// Slope of piece k, between breakpoints k and k+1.
  std::vector<double> slopes() const;
  double operator()(double t) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

struct HingeAtom {
  double location;
  double mass;
};

/// rho(t) = constant + base_slope * t + sum mass * (t - location)_+
struct HingeDecomposition {
  double constant = 0.0;
  double base_slope = 0.0;
  std::vector<HingeAtom> atoms;

  double operator()(double t) const;
  double total_mass() const;
};

/// sup over w in [lo, hi] of t*w - gamma(w); attained at a breakpoint.
double convex_conjugate(const PiecewiseLinearConvex& gamma, double t);

/// The conjugate as a function: breakpoints at the slopes of gamma plus one
/// padding point on each side so the end slopes equal lo and hi.
PiecewiseLinearConvex conjugate_function(const PiecewiseLinearConvex& gamma);

/// Throws Error(NotConvex) when the slopes decrease.
HingeDecomposition hinge_decompose(const PiecewiseLinearConvex& rho);

/// Lower convex hull of a planar point set, as a convex piecewise-linear
/// function over [min x, max x]. Throws Error(DegenerateInput) if empty.
PiecewiseLinearConvex lower_convex_hull(std::vector<std::pair<double, double>> points);

}  // namespace infoorder::numerics
