#pragma once

#include <json.hpp>

#include <filesystem>

#include "infoorder/decision.hpp"
#include "infoorder/experiment.hpp"
#include "infoorder/lborder.hpp"
#include "infoorder/moral_hazard.hpp"
#include "infoorder/screening.hpp"

namespace infoorder::io {

using nlohmann::json;

/// Row sums may miss 1 by this much on load; rows are then renormalized.
inline constexpr double kLoadRowTolerance = 1e-6;

/// Reads a file and parses it. Throws ParseError naming the path.
json load_file(const std::filesystem::path& path);

/// {"states", "signals", "matrix"} or the grid form with "grid",
/// "densities" and optional "weights" (discretized on load).
FiniteExperiment experiment_from_json(const json& j);
GridExperiment grid_from_json(const json& j);
bool is_grid(const json& j);
json to_json(const FiniteExperiment& f);

DecisionProblem decision_from_json(const json& j);
MoralHazardEnv mh_env_from_json(const json& j);
ScreeningEnv screening_env_from_json(const json& j);
WeightedDichotomy dichotomy_from_json(const json& j);
Garbling garbling_from_json(const json& j);

json to_json(const OrderVerdict& v);
json to_json(const Eigen::VectorXd& v);
json to_json(const Eigen::MatrixXd& m);
/// Finite values as numbers, infinities as null.
json number_or_null(double x);

}  // namespace infoorder::io
