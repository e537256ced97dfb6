#include "infoorder/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "infoorder/error.hpp"

namespace infoorder::io {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ParseError, "field '" + field + "': " + what);
}

const json& field(const json& j, const std::string& name) {
  if (!j.is_object()) fail(name, "enclosing value is not an object");
  auto it = j.find(name);
  if (it == j.end()) fail(name, "missing");
  return *it;
}

double number(const json& j, const std::string& name) {
  if (!j.is_number()) fail(name, "expected a number");
  return j.get<double>();
}

std::vector<double> vector_of(const json& j, const std::string& name) {
  if (!j.is_array()) fail(name, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], name + "[" + std::to_string(k) + "]"));
  return out;
}

VectorXd eigen_vector(const json& j, const std::string& name) {
  const auto v = vector_of(j, name);
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Index>(v.size()));
}

MatrixXd eigen_matrix(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty()) fail(name, "expected a non-empty array of rows");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  MatrixXd m;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = vector_of(j[r], name + "[" + std::to_string(r) + "]");
    if (r == 0) {
      cols = row.size();
      m.resize(static_cast<Index>(rows), static_cast<Index>(cols));
    } else if (row.size() != cols) {
      fail(name, "ragged rows");
    }
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = row[c];
  }
  return m;
}

std::vector<std::string> strings(const json& j, const std::string& name) {
  if (!j.is_array()) fail(name, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& s : j) {
    if (!s.is_string()) fail(name, "expected an array of strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

std::vector<std::size_t> indices(const json& j, const std::string& name) {
  if (!j.is_array()) fail(name, "expected an array of state indices");
  std::vector<std::size_t> out;
  for (const auto& s : j) {
    if (!s.is_number_integer() || s.get<long long>() < 0) fail(name, "expected nonnegative integers");
    out.push_back(s.get<std::size_t>());
  }
  return out;
}

std::vector<std::string> labels_or_default(const json& j, const std::string& name,
                                           const std::string& prefix, std::size_t count) {
  if (j.contains(name)) {
    auto out = strings(j.at(name), name);
    if (out.size() != count) fail(name, "expected " + std::to_string(count) + " labels");
    return out;
  }
  std::vector<std::string> out;
  for (std::size_t k = 0; k < count; ++k) out.push_back(prefix + std::to_string(k));
  return out;
}

numerics::PiecewiseLinearConvex piecewise(const json& j, const std::string& name) {
  return numerics::PiecewiseLinearConvex(vector_of(field(j, "breakpoints"), name + ".breakpoints"),
                                         vector_of(field(j, "values"), name + ".values"));
}

// Wraps library validation errors so the message names the field.
template <class Fn>
auto within(const std::string& name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    throw Error(e.code(), "field '" + name + "': " + e.what(), e.index());
  }
}

}  // namespace

json load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, "'" + path.string() + "': " + e.what());
  }
}

bool is_grid(const json& j) { return j.is_object() && j.contains("grid"); }

GridExperiment grid_from_json(const json& j) {
  auto grid = vector_of(field(j, "grid"), "grid");
  MatrixXd dens = eigen_matrix(field(j, "densities"), "densities");
  auto labels = labels_or_default(j, "states", "t", static_cast<std::size_t>(dens.rows()));
  std::vector<double> weights = j.contains("weights")
                                    ? vector_of(j.at("weights"), "weights")
                                    : within("grid", [&] { return trapezoid_weights(grid); });
  return within("states", [&] {
    return GridExperiment{StateSpace(std::move(labels)), std::move(grid), std::move(dens),
                          std::move(weights)};
  });
}

FiniteExperiment experiment_from_json(const json& j) {
  if (is_grid(j)) {
    const auto g = grid_from_json(j);
    return within("densities", [&] { return discretize(g); });
  }
  MatrixXd m = eigen_matrix(field(j, "matrix"), "matrix");
  within("matrix", [&] {
    validate_matrix(m, kLoadRowTolerance);
    return 0;
  });
  for (Index i = 0; i < m.rows(); ++i) m.row(i) /= m.row(i).sum();
  auto states = labels_or_default(j, "states", "t", static_cast<std::size_t>(m.rows()));
  auto signals = labels_or_default(j, "signals", "x", static_cast<std::size_t>(m.cols()));
  auto space = within("states", [&] { return StateSpace(std::move(states)); });
  return within("matrix", [&] {
    return FiniteExperiment(std::move(space), std::move(signals), std::move(m));
  });
}

json to_json(const FiniteExperiment& f) {
  return json{{"states", f.states().labels()},
              {"signals", f.signals()},
              {"matrix", to_json(f.matrix())}};
}

DecisionProblem decision_from_json(const json& j) {
  MatrixXd u = eigen_matrix(field(j, "payoff"), "payoff");
  auto actions = labels_or_default(j, "actions", "a", static_cast<std::size_t>(u.rows()));
  return within("payoff", [&] { return DecisionProblem(std::move(actions), std::move(u)); });
}

MoralHazardEnv mh_env_from_json(const json& j) {
  MoralHazardEnv env;
  const auto bounds = vector_of(field(j, "u_bounds"), "u_bounds");
  if (bounds.size() != 2) fail("u_bounds", "expected [lo, hi]");
  env.u_lo = bounds[0];
  env.u_hi = bounds[1];
  const json& c = field(j, "cost");
  env.l = eigen_vector(field(c, "l"), "cost.l");
  if (c.contains("Q")) {
    env.Q = env.l.size() == 0 ? MatrixXd(0, 0) : eigen_matrix(c.at("Q"), "cost.Q");
  } else {
    env.Q = MatrixXd::Zero(env.l.size(), env.l.size());
  }
  env.c0 = c.contains("c0") ? number(c.at("c0"), "cost.c0") : 0.0;
  env.gamma = within("gamma", [&] { return piecewise(field(j, "gamma"), "gamma"); });
  within("cost", [&] {
    validate_env(env);
    return 0;
  });
  return env;
}

ScreeningEnv screening_env_from_json(const json& j) {
  ScreeningEnv env;
  env.alternatives = strings(field(j, "alternatives"), "alternatives");
  const json& types = field(j, "types");
  if (!types.is_array()) fail("types", "expected an array of beliefs");
  for (std::size_t r = 0; r < types.size(); ++r) {
    env.types.push_back(eigen_vector(types[r], "types[" + std::to_string(r) + "]"));
  }
  env.type_probs = eigen_vector(field(j, "type_probs"), "type_probs");
  env.psi = eigen_vector(field(j, "psi"), "psi");
  env.v1 = eigen_matrix(field(j, "v1"), "v1");
  env.u1 = eigen_matrix(field(j, "u1"), "u1");
  env.v2 = within("v2", [&] { return piecewise(field(j, "v2"), "v2"); });
  const auto m = vector_of(field(j, "m_bounds"), "m_bounds");
  if (m.size() != 2) fail("m_bounds", "expected [lo, hi]");
  env.m_lo = m[0];
  env.m_hi = m[1];
  return env;
}

WeightedDichotomy dichotomy_from_json(const json& j) {
  WeightedDichotomy d;
  d.omega0 = indices(field(j, "omega0"), "omega0");
  d.omega1 = indices(field(j, "omega1"), "omega1");
  d.w0 = eigen_vector(field(j, "w0"), "w0");
  d.w1 = eigen_vector(field(j, "w1"), "w1");
  return d;
}

Garbling garbling_from_json(const json& j) {
  return Garbling{eigen_matrix(field(j, "kernel"), "kernel")};
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json to_json(const VectorXd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const MatrixXd& m) {
  json out = json::array();
  for (Index i = 0; i < m.rows(); ++i) out.push_back(to_json(VectorXd(m.row(i).transpose())));
  return out;
}

json to_json(const OrderVerdict& v) {
  json out{{"holds", v.holds},
           {"witness", v.witness ? to_json(*v.witness) : json(nullptr)},
           {"margin", number_or_null(v.margin)},
           {"method", std::string(to_string(v.method))}};
  if (v.kernel) out["kernel"] = to_json(*v.kernel);
  if (v.permutation) out["permutation"] = *v.permutation;
  return out;
}

}  // namespace infoorder::io
