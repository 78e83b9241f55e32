#pragma once

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "agh/model.h"
#include "agh/subproblem.h"

namespace agh::framework {

// Any constructor of single-fleet routes. Must return a feasible
// sub-solution (see SubSolution) or throw.
using SubSolver = std::function<SubSolution(const SubProblem&)>;

// Operation ids grouped by precedence level, levels ascending, ids
// ascending inside a group. Throws InputError on non-contiguous levels.
std::vector<std::vector<int>> group_by_level(const std::vector<OperationSpec>& ops);

// Earliest start of level `level` at a flight: its arrival at level 0,
// otherwise the latest completion among the previous level's operations.
double window_start(const Flight& flight, int level, const std::vector<double>& upstream_completions);

// Departure minus, for every later level, the longest duration of that
// level's operations at this flight.
double window_end(const Instance& inst, const std::vector<std::vector<int>>& groups,
                  const Flight& flight, int level);

// Completion time per sub-problem node (index k - 1 for node k) obtained by
// replaying the routes. Throws InfeasibleError on an infeasible route.
std::vector<double> completion_times(const SubProblem& sub, const SubSolution& routes);

// Work already fixed when re-optimizing part of an instance.
struct Residual {
  double clock = 0.0;
  // (flight_id, op_id) -> completion time of an operation that must not move.
  std::map<std::pair<int, int>, double> fixed_completion;
  // op_id -> vehicles already on the apron.
  std::map<int, std::vector<VehicleStart>> vehicles;
};

struct FleetPlan {
  SubProblem sub;
  SubSolution routes;
  std::vector<RouteReplay> replays; // parallel to routes
};

struct SolveOptions {
  int threads = 1;
  const Residual* residual = nullptr;
  // Called with each sub-problem before it is solved (test hook).
  std::function<void(const SubProblem&)> observe;
};

struct RunResult {
  std::vector<FleetPlan> plans; // in solve order
  GlobalSolution solution;      // fresh instance: the complete solution
};

// Builds the sub-problem of op_id given windows per flight (parallel to
// `flights`).
SubProblem make_subproblem(const Instance& inst, int op_id, int level,
                           const std::vector<int>& flights,
                           const std::vector<std::vector<std::array<double, 2>>>& window_history);

// Level-by-level driver behind run(): pose() returns the sub-problems of
// the current level (ops ascending), commit() records their solutions and
// advances. Lets callers batch sub-problems across instances.
class Stepper {
public:
  explicit Stepper(const Instance& inst, const Residual* residual = nullptr);

  bool done() const { return level_ >= static_cast<int>(groups_.size()); }
  int level() const { return level_; }
  std::vector<SubProblem> pose();
  // Throws InfeasibleError if a plan is infeasible.
  void commit(std::vector<FleetPlan> plans);
  RunResult finish();

private:
  const Instance* inst_;
  const Residual* residual_;
  std::vector<std::vector<int>> groups_;
  double clock_;
  int level_ = 0;
  int posed_ = -1;
  std::map<std::pair<int, int>, double> completion_;
  std::vector<std::vector<std::array<double, 2>>> history_;
  std::vector<FleetPlan> plans_;
};

RunResult run(const Instance& inst, const SubSolver& solver, const SolveOptions& opts = {});

// Solves every level in order and assembles the global solution.
GlobalSolution solve(const Instance& inst, const SubSolver& solver, const SolveOptions& opts = {});

} // namespace agh::framework
