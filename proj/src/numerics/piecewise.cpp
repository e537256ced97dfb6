#include <algorithm>
#include <cmath>

#include "infoorder/error.hpp"
#include "infoorder/numerics.hpp"

namespace infoorder::numerics {

namespace {
bool slopes_convex(const std::vector<double>& s) {
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double scale = 1.0 + std::max(std::abs(s[k]), std::abs(s[k - 1]));
    if (s[k] < s[k - 1] - 1e-9 * scale) return false;
  }
  return true;
}
}  // namespace

PiecewiseLinearConvex::PiecewiseLinearConvex(std::vector<double> breakpoints,
                                             std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (breakpoints_.empty()) {
    throw Error(ErrorCode::DegenerateInput, "piecewise-linear function needs a breakpoint");
  }
  if (breakpoints_.size() != values_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "breakpoints and values differ in length");
  }
  for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
    if (!std::isfinite(breakpoints_[k]) || !std::isfinite(values_[k])) {
      throw Error(ErrorCode::InvalidArgument, "non-finite breakpoint data", k);
    }
    if (k > 0 && !(breakpoints_[k] > breakpoints_[k - 1])) {
      throw Error(ErrorCode::InvalidArgument, "breakpoints must be strictly increasing", k);
    }
  }
  if (!slopes_convex(slopes())) {
    throw Error(ErrorCode::NotConvex, "slopes decrease");
  }
}

PiecewiseLinearConvex PiecewiseLinearConvex::constant(double lo, double hi, double value) {
  if (hi == lo) return PiecewiseLinearConvex({lo}, {value});
  return PiecewiseLinearConvex({lo, hi}, {value, value});
}

PiecewiseLinearConvex PiecewiseLinearConvex::linear(double lo, double hi, double slope,
                                                    double intercept) {
  if (hi == lo) return PiecewiseLinearConvex({lo}, {intercept + slope * lo});
  return PiecewiseLinearConvex({lo, hi}, {intercept + slope * lo, intercept + slope * hi});
}

std::vector<double> PiecewiseLinearConvex::slopes() const {
  std::vector<double> s;
  s.reserve(breakpoints_.size());
  for (std::size_t k = 1; k < breakpoints_.size(); ++k) {
    s.push_back((values_[k] - values_[k - 1]) / (breakpoints_[k] - breakpoints_[k - 1]));
  }
  return s;
}

double PiecewiseLinearConvex::operator()(double t) const {
  const std::size_t n = breakpoints_.size();
  if (n == 1) return values_[0];
  std::size_t k;
  if (t <= breakpoints_.front()) {
    k = 0;
  } else if (t >= breakpoints_.back()) {
    k = n - 2;
  } else {
    k = static_cast<std::size_t>(
            std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t) -
            breakpoints_.begin()) - 1;
  }
  const double slope =
      (values_[k + 1] - values_[k]) / (breakpoints_[k + 1] - breakpoints_[k]);
  return values_[k] + slope * (t - breakpoints_[k]);
}

double HingeDecomposition::operator()(double t) const {
  double v = constant + base_slope * t;
  for (const auto& a : atoms) v += a.mass * std::max(t - a.location, 0.0);
  return v;
}

double HingeDecomposition::total_mass() const {
  double m = 0.0;
  for (const auto& a : atoms) m += a.mass;
  return m;
}

double convex_conjugate(const PiecewiseLinearConvex& gamma, double t) {
  double best = -kInf;
  const auto& w = gamma.breakpoints();
  const auto& g = gamma.values();
  for (std::size_t k = 0; k < w.size(); ++k) best = std::max(best, t * w[k] - g[k]);
  return best;
}

PiecewiseLinearConvex conjugate_function(const PiecewiseLinearConvex& gamma) {
  // Kinks of the conjugate sit at the slopes of gamma; equal consecutive
  // slopes collapse to one kink.
  std::vector<double> kinks;
  for (double s : gamma.slopes()) {
    if (kinks.empty() || s > kinks.back() + 1e-12 * (1.0 + std::abs(s))) kinks.push_back(s);
  }
  std::vector<double> ts;
  if (kinks.empty()) {
    ts = {-1.0, 1.0};
  } else {
    ts.push_back(kinks.front() - 1.0);
    ts.insert(ts.end(), kinks.begin(), kinks.end());
    ts.push_back(kinks.back() + 1.0);
  }
  std::vector<double> vals;
  vals.reserve(ts.size());
  for (double t : ts) vals.push_back(convex_conjugate(gamma, t));
  return PiecewiseLinearConvex(std::move(ts), std::move(vals));
}

HingeDecomposition hinge_decompose(const PiecewiseLinearConvex& rho) {
  const auto s = rho.slopes();
  if (!slopes_convex(s)) throw Error(ErrorCode::NotConvex, "slopes decrease");
  HingeDecomposition h;
  const auto& x = rho.breakpoints();
  h.base_slope = s.empty() ? 0.0 : s.front();
  h.constant = rho.values().front() - h.base_slope * x.front();
  for (std::size_t k = 1; k + 1 < x.size(); ++k) {
    const double jump = s[k] - s[k - 1];
    if (jump > 0.0) h.atoms.push_back({x[k], jump});
  }
  return h;
}

PiecewiseLinearConvex lower_convex_hull(std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw Error(ErrorCode::DegenerateInput, "no points");
  for (const auto& [x, y] : points) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw Error(ErrorCode::DegenerateInput, "non-finite point");
    }
  }
  std::sort(points.begin(), points.end());
  // Keep the lowest value per abscissa.
  std::vector<std::pair<double, double>> uniq;
  for (const auto& p : points) {
    if (!uniq.empty() && p.first == uniq.back().first) continue;
    uniq.push_back(p);
  }
  std::vector<std::pair<double, double>> hull;
  auto cross = [](const auto& o, const auto& a, const auto& b) {
    return (a.first - o.first) * (b.second - o.second) -
           (a.second - o.second) * (b.first - o.first);
  };
  for (const auto& p : uniq) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0.0) {
      hull.pop_back();
    }
    hull.push_back(p);
  }
  std::vector<double> xs, ys;
  for (const auto& [x, y] : hull) {
    xs.push_back(x);
    ys.push_back(y);
  }
  return PiecewiseLinearConvex(std::move(xs), std::move(ys));
}

}  // namespace infoorder::numerics
