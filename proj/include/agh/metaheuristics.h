#pragma once

#include <cstdint>
#include <vector>

#include "agh/subproblem.h"

namespace agh::meta {

struct SaParams {
  int neighborhood_size = 500;
  int max_iter = 100;
  double t0 = 200.0;
  double cooling = 0.9;
  double time_limit = 0.0; // seconds, 0 = none
};

enum class Acceptance { Greedy, Metropolis };

struct LnsParams {
  double destroy_fraction = 0.5;
  int max_iter = 200;
  double iter_time_limit = 0.0;  // seconds per repair, 0 = none
  double total_time_limit = 0.0; // seconds, 0 = none
  Acceptance acceptance = Acceptance::Greedy;
  double t0 = 200.0;
  double cooling = 0.95;
  int cooling_every = 10;
};

// Costs observed during a search, for inspection.
struct Trace {
  std::vector<double> incumbent; // current solution cost after each iteration
  std::vector<double> best;      // best-so-far cost after each iteration
};

// Swap-neighborhood annealing started from nearest neighbor. Each iteration
// samples up to neighborhood_size feasible swaps of two flights (uniformly
// without replacement), keeps the cheapest, and accepts it by the
// Metropolis rule. Returns the best solution seen.
SubSolution simulated_annealing(const SubProblem& sub, const SaParams& p, std::uint64_t seed,
                                Trace* trace = nullptr);

// Number of flights removed by one destroy step.
int removal_count(int n_flights, double fraction);

// Destroy/repair search started from nearest neighbor: remove a random
// share of flights, reinsert them in random order at their cheapest
// feasible positions.
SubSolution lns(const SubProblem& sub, const LnsParams& p, std::uint64_t seed,
                Trace* trace = nullptr);

// lns with Metropolis acceptance.
SubSolution lns_sa(const SubProblem& sub, LnsParams p, std::uint64_t seed, Trace* trace = nullptr);

} // namespace agh::meta
