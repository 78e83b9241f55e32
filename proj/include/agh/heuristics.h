#pragma once

#include <cstdint>
#include <string>

#include "agh/subproblem.h"

namespace agh::heuristics {

enum class InsertionRule { Random, Nearest, Farthest };

InsertionRule parse_insertion_rule(const std::string& name);
std::string to_string(InsertionRule rule);

// Greedy env rollout: always the selectable flight closest in travel time
// to the current position (lowest node id on ties), the depot when none.
SubSolution nearest_neighbor(const SubProblem& sub);

// Cheapest feasible position of `node` over all routes.
struct InsertionMove {
  int route = -1; // -1: no feasible position
  int position = 0;
  double delta = 0.0;
};
InsertionMove best_insertion(const SubProblem& sub, const SubSolution& routes, int node);

// Inserts `node` at its cheapest feasible position, opening a fresh route
// when none exists. Throws InfeasibleError if even a fresh route fails.
void insert_cheapest(const SubProblem& sub, SubSolution& routes, int node);

SubSolution insertion(const SubProblem& sub, InsertionRule rule, std::uint64_t seed);

// Savings of serving j right after i instead of via the depot.
double savings(const SubProblem& sub, int gate_i, int gate_j);

// Sequential savings construction with replay-checked merges.
SubSolution cws(const SubProblem& sub);

// Resumed routes first (in vehicle order), then non-empty fresh routes.
SubSolution normalized(const SubProblem& sub, SubSolution routes);

} // namespace agh::heuristics
