#pragma once

#include <Eigen/Dense>

#include <random>
#include <utility>

#include "infoorder/decision.hpp"
#include "infoorder/experiment.hpp"
#include "infoorder/moral_hazard.hpp"
#include "infoorder/numerics.hpp"
#include "infoorder/screening.hpp"

namespace testsupport {

using Rng = std::mt19937_64;

int uniform_int(Rng& rng, int lo, int hi);
double uniform(Rng& rng, double lo = 0.0, double hi = 1.0);

/// Row-stochastic matrix; each entry is zeroed with probability `sparsity`
/// (rows keep at least one positive entry).
Eigen::MatrixXd random_stochastic(Rng& rng, int rows, int cols, double sparsity = 0.0);
infoorder::FiniteExperiment random_experiment(Rng& rng, int states, int signals,
                                              double sparsity = 0.0);
infoorder::Garbling random_garbling(Rng& rng, int from, int to);

using Pair = std::pair<infoorder::FiniteExperiment, infoorder::FiniteExperiment>;

/// (F, G) with G a garbling of F.
Pair garbled_pair(Rng& rng, int states, int max_signals = 4);

/// Random pair whose exact LB check fails with margin below -min_gap.
Pair failing_pair(Rng& rng, int states, double min_gap = 1e-4);

/// Random convex piecewise-linear function on [lo, hi] with `pieces` pieces.
infoorder::numerics::PiecewiseLinearConvex random_convex(Rng& rng, int pieces, double lo = 0.0,
                                                         double hi = 1.0);

/// QCC problem: quadratic-loss family half the time, otherwise random
/// payoffs accepted by is_qcc.
infoorder::DecisionProblem random_qcc_problem(Rng& rng, int states, int actions);

/// Environment plus target for which some scheme under `g` is feasible.
struct MHCase {
  infoorder::MoralHazardEnv env;
  infoorder::TargetAction target;
};
MHCase random_mh_case(Rng& rng, const infoorder::FiniteExperiment& g, bool zero_target = false);

infoorder::ScreeningEnv random_screening_env(Rng& rng, int states, int types, int alternatives);
infoorder::RandomizedRule random_rule(Rng& rng, int types, int alternatives, bool deterministic);

}  // namespace testsupport
