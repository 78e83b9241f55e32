#pragma once

#include <string>
#include <vector>

#include "agh/model.h"
#include "agh/solvers.h"

namespace agh::bench {

struct Cell {
  bool ok = false;
  double objective = 0.0;
  double seconds = 0.0; // wall clock around the solver call only
  std::string error;
};

struct Table {
  std::vector<std::string> solvers;
  std::vector<std::vector<Cell>> cells; // [instance][solver]
};

// Solves every instance with every solver. Instances run concurrently;
// rows stay in instance order. A throwing solver is recorded as a failure.
Table run(const std::vector<Instance>& instances, const std::vector<solvers::Solver>& solvers,
          int threads = 1);

// Gap of a solved cell to the best solved cell of its instance:
// |c - best| / best, 0 when best is 0.
double gap(double objective, double best);

struct Summary {
  std::string solver;
  int solved = 0;
  int failures = 0;
  double mean_objective = 0.0; // over solved instances
  double mean_gap = 0.0;       // over solved instances
  double mean_seconds = 0.0;
};

std::vector<Summary> summarize(const Table& t);

// With `timing` false the time column holds "NA" so the file is
// reproducible byte for byte.
std::string summary_csv(const std::vector<Summary>& s, bool timing);
std::string instance_csv(const Table& t, bool timing);

} // namespace agh::bench
