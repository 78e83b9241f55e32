#pragma once

#include <span>
#include <vector>

#include "agh/subproblem.h"

namespace agh::env {

// MDP state of one sub-problem rollout. Value type; copies are independent.
struct RolloutState {
  const SubProblem* sub = nullptr;
  std::vector<int> actions;
  int last_node = kDepotNode; // -1 while a resumed vehicle sits at its start gate
  int last_gate = kDepotGate;
  int vehicle = -1;           // resumed vehicle index, -1 for a fresh one
  int next_vehicle = 0;       // next resumed vehicle to take over
  int remaining = 0;          // capacity units left on the current vehicle
  double clock = 0.0;         // FT: completion time at the last node
  std::vector<char> served;   // per node, index 0 unused
  int n_served = 0;
  double cost = 0.0;          // distance driven so far (closing legs excluded)

  // Q_t in [0, 1].
  double capacity_left() const { return static_cast<double>(remaining) / sub->capacity; }
  bool done() const { return n_served == sub->size(); }
};

RolloutState reset(const SubProblem& sub);

// Selectable flags per node (1 = may be chosen). A flight is selectable iff
// unserved, its demand fits, and service can complete inside its window;
// the depot is blocked right after a depot visit while any flight is
// selectable. Returns all zeros once every flight is served. Throws
// InfeasibleError at a dead end.
std::vector<char> feasible_mask(const RolloutState& s);

// Applies an action in place. Throws InputError if the action is not
// selectable.
void apply(RolloutState& s, int action);
void apply(RolloutState& s, int action, const std::vector<char>& mask);
RolloutState step(RolloutState s, int action);

// Replays a complete episode and returns its total distance including all
// depot legs. Throws InputError if the episode is incomplete or invalid.
double tour_cost(const SubProblem& sub, std::span<const int> actions);

} // namespace agh::env
