#include "agh/oracle.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "agh/env.h"

namespace agh::oracle {

namespace {

struct Search {
  const SubProblem* sub = nullptr;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> best_actions;
  bool found = false;
  long long expanded = 0;

  double slack() const { return 1e-9 * std::max(1.0, best); }

  void dfs(const env::RolloutState& s) {
    ++expanded;
    if (s.done()) {
      const double cost = solution_cost(*sub, from_actions(*sub, s.actions));
      if (!found || cost < best - slack()) {
        best = cost;
        best_actions = s.actions;
        found = true;
      }
      return;
    }
    std::vector<char> mask;
    try {
      mask = env::feasible_mask(s);
    } catch (const InfeasibleError&) {
      return;
    }
    for (int a = 0; a < static_cast<int>(mask.size()); ++a) {
      if (!mask[static_cast<std::size_t>(a)]) {
        continue;
      }
      auto next = s;
      env::apply(next, a, mask);
      // The vehicle still has to get back to the depot.
      const double bound = next.cost + sub->gate_distance(next.last_gate, kDepotGate);
      if (found && bound > best + slack()) {
        continue;
      }
      dfs(next);
    }
  }
};

} // namespace

SubResult exact_subproblem(const SubProblem& sub, int limit) {
  if (sub.size() > limit) {
    throw InputError("oracle limited to " + std::to_string(limit) + " flights, got " +
                     std::to_string(sub.size()));
  }
  Search search;
  search.sub = &sub;
  search.dfs(env::reset(sub));
  if (!search.found) {
    throw InfeasibleError("sub-problem of op " + std::to_string(sub.op_id) +
                          " has no feasible solution");
  }
  SubResult result;
  result.routes = from_actions(sub, search.best_actions);
  result.cost = search.best;
  result.nodes_expanded = search.expanded;
  return result;
}

namespace {

using RouteSet = std::vector<std::vector<int>>;

// Every set of routes (ordered visit lists) covering flights 1..n.
void enumerate_route_sets(int k, int n, RouteSet& cur, std::vector<RouteSet>& out) {
  if (k > n) {
    out.push_back(cur);
    return;
  }
  for (std::size_t r = 0; r < cur.size(); ++r) {
    for (std::size_t pos = 0; pos <= cur[r].size(); ++pos) {
      cur[r].insert(cur[r].begin() + static_cast<std::ptrdiff_t>(pos), k);
      enumerate_route_sets(k + 1, n, cur, out);
      cur[r].erase(cur[r].begin() + static_cast<std::ptrdiff_t>(pos));
    }
  }
  cur.push_back({k});
  enumerate_route_sets(k + 1, n, cur, out);
  cur.pop_back();
}

} // namespace

GlobalResult exact_global(const Instance& inst) {
  const int n = inst.num_flights();
  const int n_ops = inst.num_operations();
  if (n > kGlobalFlightLimit || n_ops > kGlobalOpLimit) {
    throw InputError("global oracle limited to " + std::to_string(kGlobalFlightLimit) +
                     " flights and " + std::to_string(kGlobalOpLimit) + " operations");
  }
  const auto& ops = inst.operations();

  std::vector<RouteSet> sets;
  RouteSet cur;
  enumerate_route_sets(1, n, cur, sets);

  // Capacity filter and cost per fleet.
  std::vector<std::vector<std::size_t>> usable(static_cast<std::size_t>(n_ops));
  std::vector<std::vector<double>> set_cost(static_cast<std::size_t>(n_ops));
  for (int f = 0; f < n_ops; ++f) {
    const int op_id = ops[static_cast<std::size_t>(f)].op_id;
    const int cap = inst.fleet(op_id).capacity;
    for (std::size_t s = 0; s < sets.size(); ++s) {
      bool ok = true;
      double cost = 0.0;
      for (const auto& route : sets[s]) {
        int load = 0;
        for (int j : route) {
          load += inst.flight(j).demand.at(op_id);
        }
        ok = ok && load <= cap;
        cost += route_cost(inst, Route{op_id, route, {}});
      }
      if (ok) {
        usable[static_cast<std::size_t>(f)].push_back(s);
      }
      set_cost[static_cast<std::size_t>(f)].push_back(cost);
    }
  }

  GlobalResult best;
  bool found = false;
  std::vector<std::size_t> choice(static_cast<std::size_t>(n_ops));
  // start[f][j], earliest feasible start of op f at flight j.
  std::vector<std::vector<double>> start(static_cast<std::size_t>(n_ops),
                                         std::vector<double>(static_cast<std::size_t>(n) + 1));

  auto schedule = [&]() -> bool {
    for (int f = 0; f < n_ops; ++f) {
      for (int j = 1; j <= n; ++j) {
        start[static_cast<std::size_t>(f)][static_cast<std::size_t>(j)] = inst.flight(j).arrival;
      }
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (int f = 0; f < n_ops; ++f) {
        const auto& op = ops[static_cast<std::size_t>(f)];
        for (const auto& route : sets[choice[static_cast<std::size_t>(f)]]) {
          int node = kDepotNode;
          double clock = 0.0;
          for (int j : route) {
            const auto& fl = inst.flight(j);
            double t = std::max(clock + travel_time(inst, op.op_id, node, j), fl.arrival);
            for (int g = 0; g < n_ops; ++g) {
              const auto& up = ops[static_cast<std::size_t>(g)];
              if (up.level < op.level) {
                t = std::max(t, start[static_cast<std::size_t>(g)][static_cast<std::size_t>(j)] +
                                  up.duration(fl.flight_type));
              }
            }
            auto& slot = start[static_cast<std::size_t>(f)][static_cast<std::size_t>(j)];
            if (t > slot) {
              slot = t;
              changed = true;
            }
            if (slot + op.duration(fl.flight_type) > fl.departure) {
              return false;
            }
            clock = slot + op.duration(fl.flight_type);
            node = j;
          }
        }
      }
    }
    return true;
  };

  std::function<void(int, double)> rec = [&](int f, double cost) {
    if (found && cost >= best.cost) {
      return;
    }
    if (f == n_ops) {
      if (!schedule()) {
        return;
      }
      best.cost = cost;
      best.solution.routes.clear();
      for (int g = 0; g < n_ops; ++g) {
        const int op_id = ops[static_cast<std::size_t>(g)].op_id;
        for (const auto& route : sets[choice[static_cast<std::size_t>(g)]]) {
          Route r{op_id, route, {}};
          for (int j : route) {
            r.start_times.push_back(start[static_cast<std::size_t>(g)][static_cast<std::size_t>(j)]);
          }
          best.solution.routes.push_back(std::move(r));
        }
      }
      found = true;
      return;
    }
    for (std::size_t s : usable[static_cast<std::size_t>(f)]) {
      choice[static_cast<std::size_t>(f)] = s;
      rec(f + 1, cost + set_cost[static_cast<std::size_t>(f)][s]);
    }
  };
  rec(0, 0.0);
  if (!found) {
    throw InfeasibleError("instance has no feasible schedule");
  }
  best.solution.objective = global_cost(inst, best.solution);
  best.cost = best.solution.objective;
  return best;
}

} // namespace agh::oracle
