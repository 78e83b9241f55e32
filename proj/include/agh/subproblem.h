#pragma once

#include <array>
#include <memory>
#include <vector>

#include "agh/model.h"

namespace agh {

// One flight of a single-fleet sub-problem. Node k of the sub-problem is
// flights[k - 1]; node 0 is the depot.
struct SubFlight {
  int flight_id = 0;
  int gate = 0;
  int demand = 0; // raw units; normalized demand is demand / capacity
  double duration = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  // Windows of this flight at levels 0..level (last entry equals the current
  // window). Consumed by the recurrent time-window encoder.
  std::vector<std::array<double, 2>> window_history;
};

// A vehicle already on the apron when the sub-problem is posed: it resumes
// from `gate` at `clock` with `remaining` units of capacity.
struct VehicleStart {
  int gate = kDepotGate;
  int remaining = 0;
  double clock = 0.0;
};

// The VRPTW slice of one fleet at one precedence level.
struct SubProblem {
  int op_id = 0;
  int fleet_index = 0;
  int level = 0;
  int capacity = 1;
  double speed = 1.0;
  double horizon = 1.0;      // time normalization constant
  double release_time = 0.0; // clock of a fresh vehicle leaving the depot
  std::vector<SubFlight> flights;
  std::vector<VehicleStart> vehicles; // resumed, in order, before fresh ones
  std::shared_ptr<const GateMetric> metric;

  int size() const { return static_cast<int>(flights.size()); }
  const SubFlight& flight(int node) const { return flights[static_cast<std::size_t>(node - 1)]; }
  int node_gate(int node) const { return node == kDepotNode ? kDepotGate : flight(node).gate; }
  double gate_distance(int a, int b) const { return (*metric)(a, b); }
  double distance(int node_i, int node_j) const {
    return gate_distance(node_gate(node_i), node_gate(node_j));
  }
  double gate_travel(int a, int b) const { return gate_distance(a, b) / speed; }
  double normalized_demand(int node) const {
    return static_cast<double>(flight(node).demand) / capacity;
  }
};

// A route of a sub-solution. vehicle == -1 is a fresh vehicle from the
// depot; otherwise it indexes SubProblem::vehicles.
struct SubRoute {
  int vehicle = -1;
  std::vector<int> nodes;

  bool operator==(const SubRoute&) const = default;
};

// Convention: one entry per resumed vehicle (possibly empty, in vehicle
// order) followed by non-empty fresh routes.
using SubSolution = std::vector<SubRoute>;

struct RouteReplay {
  bool feasible = true;
  double cost = 0.0;
  std::vector<double> starts;
  std::vector<double> completions;
  double end_clock = 0.0;
  int remaining = 0;
};

// Simulates one route under the capacity and complete-by-window rules.
// Stops at the first violation (feasible == false).
RouteReplay replay_route(const SubProblem& sub, const SubRoute& route);

// Start gate/clock/capacity of the vehicle that drives `route`.
VehicleStart route_origin(const SubProblem& sub, int vehicle);

double solution_cost(const SubProblem& sub, const SubSolution& sol);

// True iff every flight is covered exactly once, resumed vehicles appear
// once each in order, and every route replays feasibly.
bool solution_feasible(const SubProblem& sub, const SubSolution& sol);

// Env action sequence for a sub-solution and back. The trailing depot
// return is implicit.
std::vector<int> to_actions(const SubProblem& sub, const SubSolution& sol);
SubSolution from_actions(const SubProblem& sub, const std::vector<int>& actions);

} // namespace agh
