#pragma once

#include "agh/model.h"
#include "agh/subproblem.h"

namespace agh::oracle {

inline constexpr int kDefaultSubLimit = 7;
inline constexpr int kGlobalFlightLimit = 3;
inline constexpr int kGlobalOpLimit = 2;

struct SubResult {
  SubSolution routes;
  double cost = 0.0;
  long long nodes_expanded = 0;
};

// Optimal routes of one sub-problem by depth-first branch-and-bound over env
// actions (depot first, then flights by id). Among optima the lexicographically
// smallest action sequence is returned. Throws InputError above `limit`
// flights and InfeasibleError if no complete episode exists.
SubResult exact_subproblem(const SubProblem& sub, int limit = kDefaultSubLimit);

struct GlobalResult {
  GlobalSolution solution;
  double cost = 0.0;
};

// Global optimum of a micro instance under the full-model constraints
// (windows [arrival, departure], completion by departure, precedence across
// fleets), by enumerating every per-fleet set of routes.
GlobalResult exact_global(const Instance& inst);

} // namespace agh::oracle
