#include "agh/bench.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "agh/parallel.h"

namespace agh::bench {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::vector<double> best_per_instance(const Table& t) {
  std::vector<double> best;
  for (const auto& row : t.cells) {
    double b = std::numeric_limits<double>::infinity();
    for (const auto& c : row) {
      if (c.ok) b = std::min(b, c.objective);
    }
    best.push_back(b);
  }
  return best;
}

} // namespace

Table run(const std::vector<Instance>& instances, const std::vector<solvers::Solver>& solvers,
          int threads) {
  if (solvers.empty()) throw InputError("bench needs at least one solver");
  Table t;
  for (const auto& s : solvers) t.solvers.push_back(s.name);
  t.cells.assign(instances.size(), std::vector<Cell>(solvers.size()));
  parallel_for(static_cast<int>(instances.size()), threads, [&](int i) {
    const auto& inst = instances[static_cast<std::size_t>(i)];
    for (std::size_t s = 0; s < solvers.size(); ++s) {
      auto& cell = t.cells[static_cast<std::size_t>(i)][s];
      try {
        if (solvers[s].params) solvers::check_compatible(*solvers[s].params, inst);
        const auto t0 = std::chrono::steady_clock::now();
        const auto sol = framework::solve(inst, solvers[s].solve);
        cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        cell.objective = sol.objective;
        cell.ok = true;
      } catch (const std::exception& e) {
        cell.ok = false;
        cell.error = e.what();
      }
    }
  });
  return t;
}

double gap(double objective, double best) {
  if (best == 0.0) return objective == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(objective - best) / best;
}

std::vector<Summary> summarize(const Table& t) {
  const auto best = best_per_instance(t);
  std::vector<Summary> out;
  for (std::size_t s = 0; s < t.solvers.size(); ++s) {
    Summary sm;
    sm.solver = t.solvers[s];
    for (std::size_t i = 0; i < t.cells.size(); ++i) {
      const auto& c = t.cells[i][s];
      if (!c.ok) {
        ++sm.failures;
        continue;
      }
      ++sm.solved;
      sm.mean_objective += c.objective;
      sm.mean_gap += gap(c.objective, best[i]);
      sm.mean_seconds += c.seconds;
    }
    if (sm.solved > 0) {
      sm.mean_objective /= sm.solved;
      sm.mean_gap /= sm.solved;
      sm.mean_seconds /= sm.solved;
    }
    out.push_back(sm);
  }
  return out;
}

std::string summary_csv(const std::vector<Summary>& s, bool timing) {
  std::ostringstream out;
  out << "solver,solved,failures,mean_objective,mean_gap,mean_time_s\n";
  for (const auto& r : s) {
    out << r.solver << ',' << r.solved << ',' << r.failures << ','
        << (r.solved ? num(r.mean_objective) : "NA") << ',' << (r.solved ? num(r.mean_gap) : "NA")
        << ',' << (timing && r.solved ? num(r.mean_seconds) : "NA") << '\n';
  }
  return out.str();
}

std::string instance_csv(const Table& t, bool timing) {
  const auto best = best_per_instance(t);
  std::ostringstream out;
  out << "instance,solver,status,objective,gap,time_s\n";
  for (std::size_t i = 0; i < t.cells.size(); ++i) {
    for (std::size_t s = 0; s < t.solvers.size(); ++s) {
      const auto& c = t.cells[i][s];
      out << i << ',' << t.solvers[s] << ',' << (c.ok ? "ok" : "failed") << ','
          << (c.ok ? num(c.objective) : "NA") << ',' << (c.ok ? num(gap(c.objective, best[i])) : "NA")
          << ',' << (timing && c.ok ? num(c.seconds) : "NA") << '\n';
    }
  }
  return out.str();
}

} // namespace agh::bench
