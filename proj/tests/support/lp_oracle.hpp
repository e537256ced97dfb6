#pragma once

#include <random>

#include "infoorder/numerics.hpp"

namespace testsupport {

struct OracleResult {
  bool feasible = false;
  double value = 0.0;
};

/// Brute-force optimum over all basic solutions. Every variable must have
/// finite bounds so the feasible set is a polytope.
OracleResult vertex_enumeration(const infoorder::numerics::LinearProgram& lp);

/// Small LP with box bounds, a few random rows, sometimes infeasible.
infoorder::numerics::LinearProgram random_box_lp(std::mt19937_64& rng);

}  // namespace testsupport
