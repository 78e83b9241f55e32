#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "agh/framework.h"
#include "agh/metaheuristics.h"
#include "agh/oracle.h"
#include "agh/policy.h"

namespace agh::solvers {

struct Options {
  std::uint64_t seed = 0;  // stochastic solvers draw stream (seed, op_id)
  meta::SaParams sa;
  meta::LnsParams lns;
  int samples = 1;         // policy: 1 = greedy, k > 1 = best of k samples
  int oracle_limit = oracle::kDefaultSubLimit;
};

// A sub-problem solver built from a name. Owns whatever it needs (policy
// parameters) so it can outlive the call that made it.
struct Solver {
  std::string name;
  framework::SubSolver solve;
  std::shared_ptr<const policy::PolicyParams> params;
};

// Names: nn, cws, insertion:<random|nearest|farthest>, sa, lns, lns-sa,
// oracle, policy:<params file>. Throws InputError on anything else.
Solver make(const std::string& name, const Options& opts = {});

// Policy solver over parameters already in memory.
Solver make_policy(std::shared_ptr<const policy::PolicyParams> params, const Options& opts = {});

// Throws InputError if `p` cannot embed every gate and fleet of `inst`.
void check_compatible(const policy::PolicyParams& p, const Instance& inst);

} // namespace agh::solvers
