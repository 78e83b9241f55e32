#include "agh/subproblem.h"

#include <algorithm>

namespace agh {

VehicleStart route_origin(const SubProblem& sub, int vehicle) {
  if (vehicle < 0) {
    return {kDepotGate, sub.capacity, sub.release_time};
  }
  if (vehicle >= static_cast<int>(sub.vehicles.size())) {
    throw InputError("route refers to unknown resumed vehicle");
  }
  return sub.vehicles[static_cast<std::size_t>(vehicle)];
}

RouteReplay replay_route(const SubProblem& sub, const SubRoute& route) {
  RouteReplay r;
  const auto origin = route_origin(sub, route.vehicle);
  int gate = origin.gate;
  double clock = origin.clock;
  int remaining = origin.remaining;
  r.starts.reserve(route.nodes.size());
  r.completions.reserve(route.nodes.size());
  for (int node : route.nodes) {
    if (node < 1 || node > sub.size()) {
      throw InputError("route visits unknown sub-problem node " + std::to_string(node));
    }
    const auto& f = sub.flight(node);
    if (f.demand > remaining) {
      r.feasible = false;
      break;
    }
    const double start = std::max(clock + sub.gate_travel(gate, f.gate), f.window_start);
    const double done = start + f.duration;
    if (done > f.window_end) {
      r.feasible = false;
      break;
    }
    r.cost += sub.gate_distance(gate, f.gate);
    r.starts.push_back(start);
    r.completions.push_back(done);
    remaining -= f.demand;
    clock = done;
    gate = f.gate;
  }
  r.cost += sub.gate_distance(gate, kDepotGate);
  r.end_clock = clock;
  r.remaining = remaining;
  return r;
}

double solution_cost(const SubProblem& sub, const SubSolution& sol) {
  double cost = 0.0;
  for (const auto& route : sol) {
    if (route.vehicle < 0 && route.nodes.empty()) {
      continue;
    }
    cost += replay_route(sub, route).cost;
  }
  return cost;
}

bool solution_feasible(const SubProblem& sub, const SubSolution& sol) {
  std::vector<int> seen(static_cast<std::size_t>(sub.size()) + 1, 0);
  int next_vehicle = 0;
  bool fresh_started = false;
  for (const auto& route : sol) {
    if (route.vehicle >= 0) {
      if (fresh_started || route.vehicle != next_vehicle) {
        return false;
      }
      ++next_vehicle;
    } else {
      fresh_started = true;
      if (route.nodes.empty()) {
        return false;
      }
    }
    for (int node : route.nodes) {
      if (node < 1 || node > sub.size() || seen[static_cast<std::size_t>(node)]++ > 0) {
        return false;
      }
    }
    if (!replay_route(sub, route).feasible) {
      return false;
    }
  }
  if (next_vehicle != static_cast<int>(sub.vehicles.size())) {
    return false;
  }
  return std::all_of(seen.begin() + 1, seen.end(), [](int c) { return c == 1; });
}

std::vector<int> to_actions(const SubProblem& sub, const SubSolution& sol) {
  (void)sub;
  std::vector<int> actions;
  for (const auto& route : sol) {
    if (route.vehicle < 0 && route.nodes.empty()) {
      continue;
    }
    actions.insert(actions.end(), route.nodes.begin(), route.nodes.end());
    actions.push_back(kDepotNode);
  }
  while (!actions.empty() && actions.back() == kDepotNode) {
    actions.pop_back();
  }
  return actions;
}

SubSolution from_actions(const SubProblem& sub, const std::vector<int>& actions) {
  SubSolution sol;
  const int n_resumed = static_cast<int>(sub.vehicles.size());
  int vehicle = 0;
  SubRoute current{n_resumed > 0 ? 0 : -1, {}};
  auto close = [&]() {
    if (current.vehicle >= 0 || !current.nodes.empty()) {
      sol.push_back(current);
    }
    ++vehicle;
    current = SubRoute{vehicle < n_resumed ? vehicle : -1, {}};
  };
  for (int a : actions) {
    if (a == kDepotNode) {
      close();
    } else {
      current.nodes.push_back(a);
    }
  }
  close();
  while (vehicle < n_resumed) {
    close();
  }
  return sol;
}

} // namespace agh
