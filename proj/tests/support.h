#pragma once

// Builders and reference computations shared by the unit and acceptance
// tests. Reference code here deliberately avoids the library's own replay
// and env logic so it can act as an independent check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "agh/heuristics.h"
#include "agh/instgen.h"
#include "agh/oracle.h"
#include "agh/realtime.h"
#include "agh/model.h"
#include "agh/subproblem.h"

namespace agh::testing {

struct FlightSpec {
  int gate = 1;
  int demand = 1;
  double duration = 1.0;
  double a = 0.0;
  double b = 1000.0;
};

inline SubProblem make_sub(std::vector<Point> gates, const std::vector<FlightSpec>& flights,
                           int capacity = 10, double speed = 1.0) {
  SubProblem sub;
  sub.op_id = 1;
  sub.capacity = capacity;
  sub.speed = speed;
  sub.horizon = 1000.0;
  sub.metric = std::make_shared<const GateMetric>(gates);
  int id = 1;
  for (const auto& f : flights) {
    SubFlight sf;
    sf.flight_id = id++;
    sf.gate = f.gate;
    sf.demand = f.demand;
    sf.duration = f.duration;
    sf.window_start = f.a;
    sf.window_end = f.b;
    sf.window_history = {{f.a, f.b}};
    sub.flights.push_back(sf);
  }
  return sub;
}

// Random sub-problem where every flight is servable by a fresh vehicle.
inline SubProblem random_sub(std::mt19937_64& rng, int n, int capacity = 10) {
  std::uniform_real_distribution<double> coord(0.0, 100.0);
  std::vector<Point> gates{{50.0, -20.0}};
  for (int g = 0; g < n; ++g) {
    gates.push_back({std::round(coord(rng)), std::round(coord(rng))});
  }
  std::uniform_int_distribution<int> demand(1, capacity / 2 + 1);
  std::uniform_real_distribution<double> start(0.0, 120.0);
  std::uniform_real_distribution<double> width(15.0, 90.0);
  std::uniform_int_distribution<int> dur(3, 8);
  std::vector<FlightSpec> flights;
  for (int j = 0; j < n; ++j) {
    FlightSpec f;
    f.gate = j + 1;
    f.demand = std::min(demand(rng), capacity);
    f.duration = dur(rng);
    const double reach = std::hypot(gates[static_cast<std::size_t>(j + 1)].x - gates[0].x,
                                    gates[static_cast<std::size_t>(j + 1)].y - gates[0].y) / 4.0;
    f.a = std::round(start(rng));
    f.b = std::max(f.a, reach) + f.duration + std::round(width(rng));
    flights.push_back(f);
  }
  return make_sub(std::move(gates), flights, capacity, 4.0);
}

// Independent feasibility/cost of one fresh-vehicle route.
inline bool reference_route(const SubProblem& sub, const std::vector<int>& nodes, double& cost) {
  auto dist = [&](int ga, int gb) { return sub.gate_distance(ga, gb); };
  double clock = sub.release_time;
  int gate = kDepotGate;
  int load = 0;
  cost = 0.0;
  for (int node : nodes) {
    const auto& f = sub.flights[static_cast<std::size_t>(node - 1)];
    load += f.demand;
    if (load > sub.capacity) return false;
    const double arrive = clock + dist(gate, f.gate) / sub.speed;
    const double begin = arrive > f.window_start ? arrive : f.window_start;
    if (begin + f.duration > f.window_end) return false;
    cost += dist(gate, f.gate);
    clock = begin + f.duration;
    gate = f.gate;
  }
  cost += dist(gate, kDepotGate);
  return true;
}

// Cost of a route set as the ascending sum of its leg lengths, so route
// sets driving the same legs (in any order or direction) give
// bit-identical totals.
inline double canonical_cost(const SubProblem& sub, const std::vector<std::vector<int>>& routes) {
  std::vector<double> legs;
  for (const auto& r : routes) {
    double c = 0.0;
    if (!reference_route(sub, r, c)) return std::numeric_limits<double>::infinity();
    int gate = kDepotGate;
    for (int node : r) {
      const int g = sub.flights[static_cast<std::size_t>(node - 1)].gate;
      legs.push_back(sub.gate_distance(std::min(gate, g), std::max(gate, g)));
      gate = g;
    }
    legs.push_back(sub.gate_distance(std::min(gate, kDepotGate), std::max(gate, kDepotGate)));
  }
  std::sort(legs.begin(), legs.end());
  double total = 0.0;
  for (double d : legs) total += d;
  return total;
}

// Cheapest set of fresh-vehicle routes covering all flights, by exhaustive
// enumeration of every ordered partition.
inline std::vector<std::vector<int>> brute_force_routes(const SubProblem& sub) {
  const int m = sub.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::vector<int>> routes, best_routes;
  std::function<void(int)> rec = [&](int k) {
    if (k > m) {
      const double total = canonical_cost(sub, routes);
      if (total < best) {
        best = total;
        best_routes = routes;
      }
      return;
    }
    for (std::size_t r = 0; r < routes.size(); ++r) {
      for (std::size_t pos = 0; pos <= routes[r].size(); ++pos) {
        routes[r].insert(routes[r].begin() + static_cast<std::ptrdiff_t>(pos), k);
        rec(k + 1);
        routes[r].erase(routes[r].begin() + static_cast<std::ptrdiff_t>(pos));
      }
    }
    routes.push_back({k});
    rec(k + 1);
    routes.pop_back();
  };
  rec(1);
  return best_routes;
}

inline double brute_force_optimum(const SubProblem& sub) {
  const auto routes = brute_force_routes(sub);
  return routes.empty() && sub.size() > 0 ? std::numeric_limits<double>::infinity()
                                          : canonical_cost(sub, routes);
}

// Small hand-made instance: gates on a line (x = 100 * g), one op per entry
// of `levels`, durations `dur` for every type.
inline Instance line_instance(const std::vector<std::array<double, 2>>& windows,
                              const std::vector<int>& levels, double dur = 5.0,
                              int capacity = 10, double speed = 100.0) {
  std::vector<Point> gates{{0.0, 0.0}};
  std::vector<Flight> flights;
  for (std::size_t k = 0; k < windows.size(); ++k) {
    gates.push_back({100.0 * static_cast<double>(k + 1), 0.0});
    Flight f;
    f.flight_id = static_cast<int>(k) + 1;
    f.gate_id = static_cast<int>(k) + 1;
    f.flight_type = 0;
    f.arrival = windows[k][0];
    f.departure = windows[k][1];
    flights.push_back(f);
  }
  std::vector<OperationSpec> ops;
  std::map<int, Fleet> fleets;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    ops.push_back({id, "op" + std::to_string(id), levels[k], {dur, dur, dur}});
    fleets[id] = Fleet{id, capacity, speed, static_cast<int>(windows.size())};
    for (auto& f : flights) f.demand[id] = 1;
  }
  return Instance(std::move(flights), std::move(ops), std::move(fleets), std::move(gates));
}

inline Instance generated(int n, std::uint64_t seed) {
  instgen::GenConfig cfg;
  cfg.n_flights = n;
  cfg.seed = seed;
  return instgen::generate(cfg);
}

// Generated instance restricted to the first `n_ops` default operations
// (levels renumbered to stay contiguous).
inline Instance generated_subset(int n, int n_ops, std::uint64_t seed) {
  instgen::GenConfig cfg;
  cfg.n_flights = n;
  cfg.seed = seed;
  auto ops = instgen::default_operations();
  std::vector<OperationSpec> chosen;
  // One op per level first so several levels are represented.
  for (int level = 0; static_cast<int>(chosen.size()) < n_ops && level < 4; ++level) {
    for (const auto& op : ops) {
      if (op.level == level) {
        chosen.push_back(op);
        break;
      }
    }
  }
  for (std::size_t k = 0; k < chosen.size(); ++k) chosen[k].level = static_cast<int>(k);
  cfg.operations = chosen;
  return instgen::generate(cfg);
}

// Exact routes while the oracle can afford them, savings beyond that.
inline SubSolution exact_or_cws(const SubProblem& sub) {
  if (sub.size() <= oracle::kDefaultSubLimit) {
    return oracle::exact_subproblem(sub).routes;
  }
  return heuristics::cws(sub);
}

// n_initial flights known at time 0, the rest of an n_total instance
// revealed at their arrivals.
inline realtime::Stream micro_stream(int n_initial, int n_total, std::uint64_t seed) {
  return realtime::split(generated(n_total, seed), n_initial);
}

} // namespace agh::testing
