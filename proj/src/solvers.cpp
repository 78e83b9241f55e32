#include "agh/solvers.h"

#include "agh/heuristics.h"
#include "agh/parallel.h"
#include "agh/train.h"

namespace agh::solvers {

namespace {

std::uint64_t stream_of(std::uint64_t seed, const SubProblem& sub) {
  return mix_seed(seed, static_cast<std::uint64_t>(sub.op_id));
}

} // namespace

Solver make_policy(std::shared_ptr<const policy::PolicyParams> params, const Options& opts) {
  if (opts.samples < 1) throw InputError("policy sample count must be positive");
  Solver s;
  s.params = std::move(params);
  const auto& p = *s.params;
  if (opts.samples == 1) {
    s.name = "policy";
    s.solve = train::greedy_solver(p);
  } else {
    s.name = "policy-sample" + std::to_string(opts.samples);
    s.solve = train::sampling_solver(p, opts.samples, opts.seed);
  }
  return s;
}

Solver make(const std::string& name, const Options& opts) {
  const auto colon = name.find(':');
  const std::string head = name.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : name.substr(colon + 1);
  const auto seed = opts.seed;
  Solver s;
  s.name = name;
  if (head == "nn" && arg.empty()) {
    s.solve = heuristics::nearest_neighbor;
  } else if (head == "cws" && arg.empty()) {
    s.solve = heuristics::cws;
  } else if (head == "insertion") {
    const auto rule = heuristics::parse_insertion_rule(arg);
    s.solve = [rule, seed](const SubProblem& sub) {
      return heuristics::insertion(sub, rule, stream_of(seed, sub));
    };
  } else if (head == "sa" && arg.empty()) {
    const auto p = opts.sa;
    s.solve = [p, seed](const SubProblem& sub) {
      return meta::simulated_annealing(sub, p, stream_of(seed, sub));
    };
  } else if (head == "lns" && arg.empty()) {
    const auto p = opts.lns;
    s.solve = [p, seed](const SubProblem& sub) { return meta::lns(sub, p, stream_of(seed, sub)); };
  } else if ((head == "lns-sa" || head == "lns_sa") && arg.empty()) {
    const auto p = opts.lns;
    s.solve = [p, seed](const SubProblem& sub) { return meta::lns_sa(sub, p, stream_of(seed, sub)); };
  } else if (head == "oracle" && arg.empty()) {
    const int limit = opts.oracle_limit;
    s.solve = [limit](const SubProblem& sub) { return oracle::exact_subproblem(sub, limit).routes; };
  } else if (head == "policy" && !arg.empty()) {
    auto named = make_policy(std::make_shared<policy::PolicyParams>(policy::load_params(arg)), opts);
    named.name = name;
    return named;
  } else {
    throw InputError("unknown solver '" + name +
                     "' (nn, cws, insertion:<rule>, sa, lns, lns-sa, oracle, policy:<file>)");
  }
  return s;
}

void check_compatible(const policy::PolicyParams& p, const Instance& inst) {
  int max_gate = 0;
  for (const auto& f : inst.flights()) max_gate = std::max(max_gate, f.gate_id);
  if (max_gate >= p.cfg.n_gate_rows) {
    throw InputError("policy gate table has " + std::to_string(p.cfg.n_gate_rows) +
                     " rows but the instance uses gate " + std::to_string(max_gate));
  }
  if (static_cast<int>(inst.operations().size()) > p.cfg.n_fleets) {
    throw InputError("policy fleet table has " + std::to_string(p.cfg.n_fleets) +
                     " rows but the instance has " + std::to_string(inst.operations().size()) +
                     " fleets");
  }
}

} // namespace agh::solvers
