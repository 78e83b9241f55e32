#include "agh/env.h"

#include <algorithm>

namespace agh::env {

namespace {

void take_over_vehicle(RolloutState& s) {
  const auto& sub = *s.sub;
  if (s.next_vehicle < static_cast<int>(sub.vehicles.size())) {
    const auto& v = sub.vehicles[static_cast<std::size_t>(s.next_vehicle)];
    s.vehicle = s.next_vehicle++;
    s.last_node = -1;
    s.last_gate = v.gate;
    s.remaining = v.remaining;
    s.clock = v.clock;
  } else {
    s.vehicle = -1;
    s.last_node = kDepotNode;
    s.last_gate = kDepotGate;
    s.remaining = sub.capacity;
    s.clock = sub.release_time;
  }
}

bool flight_selectable(const RolloutState& s, int node) {
  if (s.served[static_cast<std::size_t>(node)]) {
    return false;
  }
  const auto& f = s.sub->flight(node);
  if (f.demand > s.remaining) {
    return false;
  }
  const double start = std::max(s.clock + s.sub->gate_travel(s.last_gate, f.gate), f.window_start);
  return start + f.duration <= f.window_end;
}

} // namespace

RolloutState reset(const SubProblem& sub) {
  RolloutState s;
  s.sub = &sub;
  s.served.assign(static_cast<std::size_t>(sub.size()) + 1, 0);
  take_over_vehicle(s);
  return s;
}

std::vector<char> feasible_mask(const RolloutState& s) {
  const int m = s.sub->size();
  std::vector<char> mask(static_cast<std::size_t>(m) + 1, 0);
  if (s.done()) {
    return mask;
  }
  bool any_flight = false;
  for (int j = 1; j <= m; ++j) {
    if (flight_selectable(s, j)) {
      mask[static_cast<std::size_t>(j)] = 1;
      any_flight = true;
    }
  }
  if (s.last_node == kDepotNode) {
    if (!any_flight) {
      for (int j = 1; j <= m; ++j) {
        if (!s.served[static_cast<std::size_t>(j)]) {
          throw InfeasibleError("dead end: flight " + std::to_string(s.sub->flight(j).flight_id) +
                                " of op " + std::to_string(s.sub->op_id) +
                                " cannot be served by a fresh vehicle");
        }
      }
    }
  } else {
    mask[kDepotNode] = 1;
  }
  return mask;
}

void apply(RolloutState& s, int action, const std::vector<char>& mask) {
  if (action < 0 || action >= static_cast<int>(mask.size()) ||
      !mask[static_cast<std::size_t>(action)]) {
    throw InputError("masked action " + std::to_string(action));
  }
  s.actions.push_back(action);
  if (action == kDepotNode) {
    s.cost += s.sub->gate_distance(s.last_gate, kDepotGate);
    take_over_vehicle(s);
    return;
  }
  const auto& f = s.sub->flight(action);
  const double start = std::max(s.clock + s.sub->gate_travel(s.last_gate, f.gate), f.window_start);
  s.cost += s.sub->gate_distance(s.last_gate, f.gate);
  s.clock = start + f.duration;
  s.remaining -= f.demand;
  s.last_node = action;
  s.last_gate = f.gate;
  s.served[static_cast<std::size_t>(action)] = 1;
  ++s.n_served;
}

void apply(RolloutState& s, int action) {
  apply(s, action, feasible_mask(s));
}

RolloutState step(RolloutState s, int action) {
  apply(s, action);
  return s;
}

double tour_cost(const SubProblem& sub, std::span<const int> actions) {
  auto s = reset(sub);
  for (int a : actions) {
    if (s.done()) {
      throw InputError("actions continue after the episode ended");
    }
    apply(s, a);
  }
  if (!s.done()) {
    throw InputError("incomplete episode");
  }
  return solution_cost(sub, from_actions(sub, s.actions));
}

} // namespace agh::env
