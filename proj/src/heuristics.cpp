#include "agh/heuristics.h"

#include <algorithm>
#include <limits>
#include <random>
#include <tuple>

#include "agh/env.h"

namespace agh::heuristics {

InsertionRule parse_insertion_rule(const std::string& name) {
  if (name == "random") return InsertionRule::Random;
  if (name == "nearest") return InsertionRule::Nearest;
  if (name == "farthest") return InsertionRule::Farthest;
  throw InputError("unknown insertion rule: " + name);
}

std::string to_string(InsertionRule rule) {
  switch (rule) {
    case InsertionRule::Random: return "random";
    case InsertionRule::Nearest: return "nearest";
    case InsertionRule::Farthest: return "farthest";
  }
  return "?";
}

SubSolution normalized(const SubProblem& sub, SubSolution routes) {
  SubSolution out;
  for (int v = 0; v < static_cast<int>(sub.vehicles.size()); ++v) {
    auto it = std::find_if(routes.begin(), routes.end(),
                           [v](const SubRoute& r) { return r.vehicle == v; });
    out.push_back(it == routes.end() ? SubRoute{v, {}} : *it);
  }
  for (auto& r : routes) {
    if (r.vehicle < 0 && !r.nodes.empty()) {
      out.push_back(std::move(r));
    }
  }
  return out;
}

SubSolution nearest_neighbor(const SubProblem& sub) {
  auto s = env::reset(sub);
  while (!s.done()) {
    const auto mask = env::feasible_mask(s);
    int pick = kDepotNode;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= sub.size(); ++j) {
      if (!mask[static_cast<std::size_t>(j)]) {
        continue;
      }
      const double t = sub.gate_travel(s.last_gate, sub.flight(j).gate);
      if (t < best) {
        best = t;
        pick = j;
      }
    }
    env::apply(s, pick, mask);
  }
  return from_actions(sub, s.actions);
}

namespace {

int route_start_gate(const SubProblem& sub, const SubRoute& r) {
  return route_origin(sub, r.vehicle).gate;
}

} // namespace

InsertionMove best_insertion(const SubProblem& sub, const SubSolution& routes, int node) {
  InsertionMove best;
  best.delta = std::numeric_limits<double>::infinity();
  const int g = sub.flight(node).gate;
  SubRoute trial;
  for (int r = 0; r < static_cast<int>(routes.size()); ++r) {
    const auto& route = routes[static_cast<std::size_t>(r)];
    const int len = static_cast<int>(route.nodes.size());
    for (int pos = 0; pos <= len; ++pos) {
      const int prev = pos == 0 ? route_start_gate(sub, route)
                                : sub.flight(route.nodes[static_cast<std::size_t>(pos - 1)]).gate;
      const int next = pos == len ? kDepotGate
                                  : sub.flight(route.nodes[static_cast<std::size_t>(pos)]).gate;
      const double delta =
        sub.gate_distance(prev, g) + sub.gate_distance(g, next) - sub.gate_distance(prev, next);
      if (!(delta < best.delta)) {
        continue;
      }
      trial.vehicle = route.vehicle;
      trial.nodes = route.nodes;
      trial.nodes.insert(trial.nodes.begin() + pos, node);
      if (replay_route(sub, trial).feasible) {
        best = {r, pos, delta};
      }
    }
  }
  if (best.route < 0) {
    best.delta = 0.0;
  }
  return best;
}

void insert_cheapest(const SubProblem& sub, SubSolution& routes, int node) {
  const auto move = best_insertion(sub, routes, node);
  if (move.route >= 0) {
    auto& nodes = routes[static_cast<std::size_t>(move.route)].nodes;
    nodes.insert(nodes.begin() + move.position, node);
    return;
  }
  SubRoute fresh{-1, {node}};
  if (!replay_route(sub, fresh).feasible) {
    throw InfeasibleError("flight " + std::to_string(sub.flight(node).flight_id) + " of op " +
                          std::to_string(sub.op_id) + " cannot be served by a fresh vehicle");
  }
  routes.push_back(std::move(fresh));
}

SubSolution insertion(const SubProblem& sub, InsertionRule rule, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SubSolution routes;
  for (int v = 0; v < static_cast<int>(sub.vehicles.size()); ++v) {
    routes.push_back({v, {}});
  }
  std::vector<int> pending;
  for (int j = 1; j <= sub.size(); ++j) {
    pending.push_back(j);
  }
  // Distance from each pending node to the nearest routed location (depot
  // and resumed vehicle positions count as routed).
  std::vector<double> reach(static_cast<std::size_t>(sub.size()) + 1,
                            std::numeric_limits<double>::infinity());
  auto touch = [&](int gate) {
    for (int j : pending) {
      reach[static_cast<std::size_t>(j)] =
        std::min(reach[static_cast<std::size_t>(j)], sub.gate_distance(gate, sub.flight(j).gate));
    }
  };
  touch(kDepotGate);
  for (const auto& v : sub.vehicles) {
    touch(v.gate);
  }
  while (!pending.empty()) {
    std::size_t k = 0;
    if (rule == InsertionRule::Random) {
      k = std::uniform_int_distribution<std::size_t>(0, pending.size() - 1)(rng);
    } else {
      for (std::size_t i = 1; i < pending.size(); ++i) {
        const double a = reach[static_cast<std::size_t>(pending[i])];
        const double b = reach[static_cast<std::size_t>(pending[k])];
        if (rule == InsertionRule::Nearest ? a < b : a > b) {
          k = i;
        }
      }
    }
    const int node = pending[k];
    pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(k));
    insert_cheapest(sub, routes, node);
    touch(sub.flight(node).gate);
  }
  return normalized(sub, std::move(routes));
}

double savings(const SubProblem& sub, int gate_i, int gate_j) {
  return sub.gate_distance(gate_i, kDepotGate) + sub.gate_distance(kDepotGate, gate_j) -
         sub.gate_distance(gate_i, gate_j);
}

SubSolution cws(const SubProblem& sub) {
  const int m = sub.size();
  const int n_resumed = static_cast<int>(sub.vehicles.size());
  // Route tails are flights 1..m or resumed vehicle origins m+1..m+V.
  SubSolution routes;
  std::vector<int> route_of(static_cast<std::size_t>(m + n_resumed) + 1, -1);
  for (int v = 0; v < n_resumed; ++v) {
    route_of[static_cast<std::size_t>(m + 1 + v)] = static_cast<int>(routes.size());
    routes.push_back({v, {}});
  }
  std::vector<int> order;
  for (int j = 1; j <= m; ++j) {
    order.push_back(j);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return sub.flight(a).window_start < sub.flight(b).window_start;
  });
  for (int j : order) {
    SubRoute single{-1, {j}};
    if (!replay_route(sub, single).feasible) {
      throw InfeasibleError("flight " + std::to_string(sub.flight(j).flight_id) + " of op " +
                            std::to_string(sub.op_id) + " cannot be served by a fresh vehicle");
    }
    route_of[static_cast<std::size_t>(j)] = static_cast<int>(routes.size());
    routes.push_back(std::move(single));
  }

  auto tail_gate = [&](int i) {
    return i <= m ? sub.flight(i).gate : sub.vehicles[static_cast<std::size_t>(i - m - 1)].gate;
  };
  std::vector<std::tuple<double, int, int>> pairs;
  for (int i = 1; i <= m + n_resumed; ++i) {
    for (int j = 1; j <= m; ++j) {
      if (i != j) {
        pairs.emplace_back(savings(sub, tail_gate(i), sub.flight(j).gate), i, j);
      }
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::make_pair(std::get<1>(a), std::get<2>(a)) <
           std::make_pair(std::get<1>(b), std::get<2>(b));
  });

  SubRoute merged;
  for (const auto& [s, i, j] : pairs) {
    if (s <= 0.0) {
      break;
    }
    const int ri = route_of[static_cast<std::size_t>(i)];
    const int rj = route_of[static_cast<std::size_t>(j)];
    if (ri == rj) {
      continue;
    }
    auto& a = routes[static_cast<std::size_t>(ri)];
    auto& b = routes[static_cast<std::size_t>(rj)];
    const int a_tail = a.nodes.empty() ? m + 1 + a.vehicle : a.nodes.back();
    if (a_tail != i || b.vehicle >= 0 || b.nodes.empty() || b.nodes.front() != j) {
      continue;
    }
    merged.vehicle = a.vehicle;
    merged.nodes = a.nodes;
    merged.nodes.insert(merged.nodes.end(), b.nodes.begin(), b.nodes.end());
    if (!replay_route(sub, merged).feasible) {
      continue;
    }
    for (int node : b.nodes) {
      route_of[static_cast<std::size_t>(node)] = ri;
    }
    a.nodes = merged.nodes;
    b.nodes.clear();
  }
  return normalized(sub, std::move(routes));
}

} // namespace agh::heuristics
