#pragma once

// Exhaustive solver for tiny built models: enumerates the arc binaries of
// each fleet, then decides the start times as a system of difference
// constraints (Bellman-Ford). Only meant for a handful of flights.

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agh/milp.h"

namespace agh::testing {

struct MicroResult {
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> values;
  bool feasible = false;
};

inline bool row_holds(const milp::Constraint& c, double lhs) {
  constexpr double tol = 1e-9;
  switch (c.sense) {
    case milp::Sense::LessEqual: return lhs <= c.rhs + tol;
    case milp::Sense::GreaterEqual: return lhs >= c.rhs - tol;
    case milp::Sense::Equal: return std::fabs(lhs - c.rhs) <= tol;
  }
  return false;
}

// Earliest feasible start times for fixed binaries, or nullopt.
inline std::optional<std::vector<double>> solve_times(const milp::MilpModel& m,
                                                      const std::vector<double>& values) {
  std::vector<int> cont;
  std::map<int, int> slot;
  for (int k = 0; k < static_cast<int>(m.vars.size()); ++k) {
    if (m.vars[static_cast<std::size_t>(k)].type == milp::VarType::Continuous) {
      slot[k] = static_cast<int>(cont.size()) + 1;
      cont.push_back(k);
    }
  }
  struct Edge { int from, to; double w; };
  std::vector<Edge> edges;
  const int z = 0;
  for (int k : cont) {
    const auto& v = m.vars[static_cast<std::size_t>(k)];
    if (std::isfinite(v.ub)) edges.push_back({z, slot[k], v.ub});
    edges.push_back({slot[k], z, -v.lb});
  }
  for (const auto& c : m.constraints) {
    double fixed = 0.0;
    std::vector<milp::Term> t;
    for (const auto& term : c.terms) {
      if (slot.contains(term.var)) t.push_back(term);
      else fixed += term.coef * values[static_cast<std::size_t>(term.var)];
    }
    if (t.empty()) {
      if (!row_holds(c, fixed)) return std::nullopt;
      continue;
    }
    if (c.sense != milp::Sense::LessEqual) return std::nullopt; // not expected
    const double rhs = c.rhs - fixed;
    if (t.size() == 1) {
      const int s = slot[t[0].var];
      if (t[0].coef > 0) edges.push_back({z, s, rhs / t[0].coef});
      else edges.push_back({s, z, rhs / -t[0].coef});
    } else if (t.size() == 2 && t[0].coef == 1.0 && t[1].coef == -1.0) {
      edges.push_back({slot[t[1].var], slot[t[0].var], rhs});
    } else {
      return std::nullopt;
    }
  }
  const int nodes = static_cast<int>(cont.size()) + 1;
  // Shortest distances from z give the latest times; negate the reverse
  // system for earliest ones: d(v -> z) shortest = -earliest(v).
  std::vector<double> dist(static_cast<std::size_t>(nodes), std::numeric_limits<double>::infinity());
  dist[0] = 0.0;
  for (int it = 0; it < nodes; ++it) {
    bool changed = false;
    for (const auto& e : edges) {
      // reversed graph: relax to -> from
      if (dist[static_cast<std::size_t>(e.to)] + e.w < dist[static_cast<std::size_t>(e.from)] - 1e-12) {
        dist[static_cast<std::size_t>(e.from)] = dist[static_cast<std::size_t>(e.to)] + e.w;
        changed = true;
      }
    }
    if (!changed) break;
    if (it == nodes - 1) return std::nullopt;
  }
  auto out = values;
  for (int k : cont) {
    const double d = dist[static_cast<std::size_t>(slot[k])];
    if (!std::isfinite(d)) return std::nullopt;
    out[static_cast<std::size_t>(k)] = -d;
  }
  return out;
}

inline MicroResult solve_micro(const milp::MilpModel& m) {
  // Binaries grouped by fleet prefix "x_f<op>_".
  std::map<std::string, std::vector<int>> groups;
  for (int k = 0; k < static_cast<int>(m.vars.size()); ++k) {
    const auto& v = m.vars[static_cast<std::size_t>(k)];
    if (v.type == milp::VarType::Binary) {
      groups[v.name.substr(0, v.name.find('_', 2))].push_back(k);
    }
  }
  std::vector<double> values(m.vars.size(), 0.0);
  // Rows touching only one group's binaries prune that group on its own.
  std::vector<std::vector<std::vector<double>>> options;
  for (const auto& [prefix, ids] : groups) {
    std::vector<const milp::Constraint*> own;
    for (const auto& c : m.constraints) {
      bool mine = !c.terms.empty();
      for (const auto& t : c.terms) {
        const auto& v = m.vars[static_cast<std::size_t>(t.var)];
        mine = mine && v.type == milp::VarType::Binary && v.name.rfind(prefix + "_", 0) == 0;
      }
      if (mine) own.push_back(&c);
    }
    std::vector<std::vector<double>> keep;
    const std::size_t count = std::size_t{1} << ids.size();
    for (std::size_t mask = 0; mask < count; ++mask) {
      for (std::size_t b = 0; b < ids.size(); ++b) values[static_cast<std::size_t>(ids[b])] = (mask >> b) & 1U;
      bool ok = true;
      for (const auto* c : own) {
        double lhs = 0.0;
        for (const auto& t : c->terms) lhs += t.coef * values[static_cast<std::size_t>(t.var)];
        if (!row_holds(*c, lhs)) { ok = false; break; }
      }
      if (ok) {
        std::vector<double> pick;
        for (int id : ids) pick.push_back(values[static_cast<std::size_t>(id)]);
        keep.push_back(pick);
      }
    }
    options.push_back(std::move(keep));
  }
  std::vector<std::vector<int>> group_ids;
  for (const auto& [prefix, ids] : groups) group_ids.push_back(ids);

  MicroResult best;
  std::vector<std::size_t> choice(options.size(), 0);
  while (true) {
    bool empty = false;
    for (std::size_t g = 0; g < options.size(); ++g) {
      if (options[g].empty()) { empty = true; break; }
      for (std::size_t b = 0; b < group_ids[g].size(); ++b) {
        values[static_cast<std::size_t>(group_ids[g][b])] = options[g][choice[g]][b];
      }
    }
    if (empty) break;
    double obj = 0.0;
    for (const auto& t : m.objective) obj += t.coef * values[static_cast<std::size_t>(t.var)];
    if (obj < best.objective - 1e-9) {
      if (auto timed = solve_times(m, values)) {
        best.objective = obj;
        best.values = *timed;
        best.feasible = true;
      }
    }
    std::size_t g = 0;
    while (g < choice.size() && ++choice[g] == options[g].size()) choice[g++] = 0;
    if (g == choice.size()) break;
  }
  return best;
}

} // namespace agh::testing
