// Acceptance criteria. Usage: agh_acceptance <workdir> <criterion>...
// Prints one PASS/FAIL line per criterion; exits non-zero if any fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "agh/env.h"
#include "agh/heuristics.h"
#include "agh/io.h"
#include "agh/metaheuristics.h"
#include "agh/milp.h"
#include "agh/oracle.h"
#include "agh/policy.h"
#include "agh/realtime.h"
#include "agh/solvers.h"
#include "agh/train.h"
#include "gradcheck.h"
#include "support.h"

using namespace agh;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path g_workdir;

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

instgen::GenConfig agh(int n) {
  instgen::GenConfig g;
  g.n_flights = n;
  return g;
}

// Held-out AGH10 set shared by the learning and sampling criteria.
std::vector<Instance> held_out() { return train::make_instances(agh(10), 200, 987654321); }
fs::path trained_params() { return g_workdir / "agh10_policy.bin"; }

Outcome feasibility() {
  const auto t0 = Clock::now();
  const auto insts = train::make_instances(agh(20), 1000, 101);
  std::vector<solvers::Solver> list;
  for (auto n : {"nn", "insertion:random", "insertion:nearest", "insertion:farthest", "cws", "sa", "lns", "lns-sa"}) {
    list.push_back(solvers::make(n, {.seed = 7}));
  }
  auto untrained = std::make_shared<policy::PolicyParams>(
    policy::PolicyParams::init(train::policy_config_for({}, agh(20)), 11));
  list.push_back(solvers::make_policy(untrained));
  list.back().name = "untrained-policy";
  long solutions = 0, violations = 0, failures = 0;
  std::string first;
  for (const auto& inst : insts) {
    for (const auto& s : list) {
      try {
        const auto rep = milp::check_solution(inst, framework::solve(inst, s.solve));
        ++solutions;
        violations += static_cast<long>(rep.violations.size());
        if (!rep.ok() && first.empty()) first = s.name + ": " + rep.violations[0].message;
      } catch (const std::exception& e) {
        ++failures;
        if (first.empty()) first = s.name + " threw: " + e.what();
      }
    }
  }
  const double secs = since(t0);
  return {violations == 0 && failures == 0 && secs <= 600.0,
          fmt("%ld solutions from %zu solvers, %ld violations, %ld failures, %.1f s (limit 600)%s", solutions,
              list.size(), violations, failures, secs, first.empty() ? "" : ("; first: " + first).c_str())};
}

Outcome oracle_dominance() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  const auto p = policy::PolicyParams::init(train::policy_config_for({}, agh(10)), 12);
  const std::vector<std::pair<std::string, framework::SubSolver>> list{
    {"nn", heuristics::nearest_neighbor},
    {"insertion:random", solvers::make("insertion:random", {.seed = 3}).solve},
    {"insertion:nearest", solvers::make("insertion:nearest").solve},
    {"insertion:farthest", solvers::make("insertion:farthest").solve},
    {"cws", heuristics::cws},
    {"sa", solvers::make("sa", {.seed = 3}).solve},
    {"lns", solvers::make("lns", {.seed = 3}).solve},
    {"lns-sa", solvers::make("lns-sa", {.seed = 3}).solve},
    {"policy", train::greedy_solver(p)}};
  int below = 0, infeasible = 0;
  std::string first;
  for (int k = 0; k < 200; ++k) {
    const auto sub = testing::random_sub(rng, 1 + k % 6, 5 + k % 6);
    const double best = oracle::exact_subproblem(sub).cost;
    for (const auto& [name, solve] : list) {
      const auto sol = solve(sub);
      if (!solution_feasible(sub, sol)) {
        ++infeasible;
        continue;
      }
      const double c = solution_cost(sub, sol);
      if (c < best - 1e-9 * std::max(1.0, best)) {
        ++below;
        if (first.empty()) first = fmt("%s %.6f < oracle %.6f", name.c_str(), c, best);
      }
    }
  }
  int mismatches = 0;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto sub = testing::random_sub(rng, 1 + k % 5, 4 + k % 7);
    std::vector<std::vector<int>> exact;
    for (const auto& r : oracle::exact_subproblem(sub).routes) exact.push_back(r.nodes);
    const double a = testing::canonical_cost(sub, exact);
    const double b = testing::brute_force_optimum(sub);
    if (a != b) {
      ++mismatches;
      worst = std::max(worst, std::abs(a - b));
    }
  }
  const double secs = since(t0);
  return {below == 0 && infeasible == 0 && mismatches == 0 && secs <= 300.0,
          fmt("200 sub-problems x %zu solvers: %d below oracle, %d infeasible; 100 enumeration cases: %d "
              "mismatches (max |diff| %.3g); %.1f s (limit 300)%s",
              list.size(), below, infeasible, mismatches, worst, secs,
              first.empty() ? "" : ("; first: " + first).c_str())};
}

Outcome gradients() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(303);
  double worst = 0.0, worst_abs = 0.0;
  long coords = 0, measured = 0;
  for (int k = 0; k < 50; ++k) {
    auto p = policy::PolicyParams::init(testing::toy_config(8, 12, k % 5 == 4), 1000 + k);
    const auto sub = testing::toy_sub(rng, 3 + k % 6, k % 3 == 0);
    const auto r = policy::rollout(p, sub, policy::Decode::Sample, 5000 + k);
    const auto mode = k % 2 ? policy::NormMode::Running : policy::NormMode::Batch;
    const auto res = testing::finite_difference_check(p, {&sub}, {r.actions}, {1.0}, mode);
    worst = std::max(worst, res.max_rel);
    worst_abs = std::max(worst_abs, res.max_abs);
    coords += res.coords;
    measured += res.measured;
  }
  // Ablation losses at mix_alpha = 1 on a sampled AGH6 batch.
  auto cfg = agh(6);
  auto p = policy::PolicyParams::init(train::policy_config_for(testing::toy_config(8, 92), cfg), 31);
  const auto insts = train::make_instances(cfg, 4, 32);
  std::vector<std::vector<double>> base;
  for (const auto& inst : insts) base.push_back(train::fleet_costs(inst, framework::run(inst, train::greedy_solver(p))));
  const auto rec = train::sample_batch(p, insts, base, 33);
  const auto own = train::policy_gradient(p, rec, train::Loss::PerFleet, 0.5);
  double ablation = 0.0;
  for (auto loss : {train::Loss::MixGlobal, train::Loss::MixFleet}) {
    const auto g = train::policy_gradient(p, rec, loss, 1.0);
    for (std::size_t k = 0; k < g.g.size(); ++k) {
      ablation = std::max(ablation, (g.g[k] - own.g[k]).cwiseAbs().maxCoeff());
    }
  }
  const double secs = since(t0);
  return {worst <= 1e-4 && ablation <= 1e-10 && secs <= 120.0,
          fmt("50 pairs, %ld coordinates (%ld above the 1e-5 floor), max relative error %.3g (limit 1e-4), "
              "max absolute error %.3g; ablation max |diff| %.3g (limit 1e-10); %.1f s (limit 120)",
              coords, measured, worst, worst_abs, ablation, secs)};
}

Outcome masking() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(404);
  long steps = 0, bad_sum = 0, masked_mass = 0, masked_pick = 0;
  double worst = 0.0;
  for (int k = 0; steps < 100000; ++k) {
    const auto p = policy::PolicyParams::init(testing::toy_config(8 + 8 * (k % 2), 16), 2000 + k);
    const auto sub = testing::toy_sub(rng, 2 + k % 12, k % 4 == 0);
    const auto enc = policy::encode(p, {&sub})[0];
    const auto r = policy::rollout(p, sub, enc, policy::Decode::Sample, 7000 + k);
    auto s = env::reset(sub);
    for (int a : r.actions) {
      const auto mask = env::feasible_mask(s);
      const auto probs = policy::decode_step(p, enc, s, mask);
      const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
      worst = std::max(worst, std::abs(sum - 1.0));
      if (std::abs(sum - 1.0) > 1e-6) ++bad_sum;
      for (std::size_t j = 0; j < mask.size(); ++j) {
        if (!mask[j] && probs[j] != 0.0) ++masked_mass;
      }
      if (!mask[static_cast<std::size_t>(a)]) {
        ++masked_pick;
        break;
      }
      env::apply(s, a, mask);
      ++steps;
    }
  }
  const double secs = since(t0);
  return {bad_sum == 0 && masked_mass == 0 && masked_pick == 0 && secs <= 120.0,
          fmt("%ld steps: max |sum - 1| %.3g (limit 1e-6), %ld masked nodes with mass, %ld masked samples; "
              "%.1f s (limit 120)",
              steps, worst, masked_mass, masked_pick, secs)};
}

Outcome windows() {
  const auto t0 = Clock::now();
  long flights_checked = 0, a_breaks = 0, b_breaks = 0, order_breaks = 0, checker = 0, formula = 0;
  for (int k = 0; k < 1000; ++k) {
    auto gen = agh(5 + k % 16);
    gen.seed = 5000 + static_cast<std::uint64_t>(k);
    const auto inst = instgen::generate(gen);
    framework::SolveOptions opts;
    // Reserved downstream time per flight type: longest duration of each
    // later level, summed.
    auto reserved = [&](int type, int level) {
      std::map<int, double> longest;
      for (const auto& op : inst.operations()) {
        if (op.level > level) longest[op.level] = std::max(longest[op.level], op.duration(type));
      }
      double sum = 0.0;
      for (const auto& [l, d] : longest) sum += d;
      return sum;
    };
    opts.observe = [&](const SubProblem& sub) {
      for (const auto& f : sub.flights) {
        ++flights_checked;
        const auto& fl = inst.flight(f.flight_id);
        if (f.window_end == fl.departure - reserved(fl.flight_type, sub.level)) ++formula;
        for (std::size_t l = 1; l < f.window_history.size(); ++l) {
          if (f.window_history[l][0] < f.window_history[l - 1][0]) ++a_breaks;
          if (f.window_history[l][1] > f.window_history[l - 1][1]) ++b_breaks;
        }
      }
    };
    const auto sol = framework::solve(inst, k % 2 ? heuristics::cws : heuristics::nearest_neighbor, opts);
    // Independent precedence check from raw start times.
    std::map<std::pair<int, int>, double> start;
    for (const auto& r : sol.routes) {
      for (std::size_t v = 0; v < r.visits.size(); ++v) start[{r.visits[v], r.op_id}] = r.start_times[v];
    }
    for (const auto& f : inst.flights()) {
      for (const auto& a : inst.operations()) {
        for (const auto& b : inst.operations()) {
          if (a.level >= b.level) continue;
          if (start.at({f.flight_id, a.op_id}) + a.duration(f.flight_type) >
              start.at({f.flight_id, b.op_id}) + 1e-9) {
            ++order_breaks;
          }
        }
      }
    }
    checker += milp::check_solution(inst, sol).count("precedence");
  }
  const double secs = since(t0);
  return {a_breaks == 0 && b_breaks == 0 && order_breaks == 0 && checker == 0 && secs <= 120.0,
          fmt("1000 instances, %ld sub-problem flights: %ld decreases of a in p, %ld increases of b in p, "
              "%ld precedence breaks (checker %ld); b equals departure minus reserved downstream time on "
              "%ld/%ld, which grows with p; %.1f s (limit 120)",
              flights_checked, a_breaks, b_breaks, order_breaks, checker, formula, flights_checked, secs)};
}

Outcome table_ordering() {
  const auto t0 = Clock::now();
  const auto insts = train::make_instances(agh(20), 100, 606);
  meta::SaParams sa; // neighborhood 500, 100 iterations, T0 200, cooling 0.9
  sa.time_limit = 6.0; // 60 s per instance over its 10 fleets
  const auto sa_solver = solvers::make("sa", {.seed = 17, .sa = sa});
  std::vector<double> nn, cw, an;
  for (const auto& inst : insts) {
    nn.push_back(framework::solve(inst, heuristics::nearest_neighbor).objective);
    cw.push_back(framework::solve(inst, heuristics::cws).objective);
    an.push_back(framework::solve(inst, sa_solver.solve).objective);
  }
  const double secs = since(t0);
  return {mean(cw) < mean(nn) && mean(an) <= mean(nn) && secs <= 1800.0,
          fmt("AGH20 x 100: mean NN %.2f, CWS %.2f, SA %.2f; need CWS < NN and SA <= NN; %.1f s (limit 1800)",
              mean(nn), mean(cw), mean(an), secs)};
}

Outcome learning() {
  const auto t0 = Clock::now();
  train::TrainConfig cfg; // AGH10, 20 epochs x 50 iterations x 32 instances
  const auto held = held_out();
  const auto untrained = train::initial_params(cfg);
  std::vector<double> nn, cw;
  for (const auto& inst : held) {
    nn.push_back(framework::solve(inst, heuristics::nearest_neighbor).objective);
    cw.push_back(framework::solve(inst, heuristics::cws).objective);
  }
  const double before = mean(train::greedy_costs(untrained, held));
  const auto res = train::train(cfg, [](const train::EpochLog& e) {
    std::cerr << "  epoch " << train::log_csv_row(e) << '\n';
  });
  const double train_secs = since(t0);
  policy::save_params(res.params, trained_params());
  train::write_log_csv(res.log, g_workdir / "agh10_train_log.csv");
  const double after = mean(train::greedy_costs(res.params, held));
  const bool a = after <= 0.85 * before;
  const bool b = after <= mean(nn);
  return {a && b && train_secs <= 7200.0,
          fmt("greedy mean on 200 held-out AGH10: trained %.2f, untrained %.2f (%.1f%% lower, need >= 15%%), "
              "NN %.2f (need <=); stretch <= CWS %.2f: %s; %.0f s (limit 7200)",
              after, before, 100.0 * (1.0 - after / before), mean(nn), mean(cw),
              after <= mean(cw) ? "met" : "not met", train_secs)};
}

Outcome sampling() {
  if (!fs::exists(trained_params())) {
    const auto r = learning();
    if (!fs::exists(trained_params())) return {false, "no trained parameters: " + r.detail};
  }
  const auto t0 = Clock::now();
  const auto p = policy::load_params(trained_params());
  const auto held = held_out();
  int ok = 0;
  std::vector<double> greedy, sampled;
  for (std::size_t i = 0; i < held.size(); ++i) {
    const double g = framework::solve(held[i], train::greedy_solver(p)).objective;
    const double s = framework::solve(held[i], train::sampling_solver(p, 128, 808 + i)).objective;
    greedy.push_back(g);
    sampled.push_back(s);
    if (s <= g) ++ok;
  }
  const double secs = since(t0);
  return {ok >= 190 && secs <= 600.0,
          fmt("best-of-128 <= greedy on %d/200 instances (need >= 190); means %.2f vs %.2f; %.1f s (limit 600)",
              ok, mean(sampled), mean(greedy), secs)};
}

Outcome realtime_streams() {
  const auto t0 = Clock::now();
  long frozen_missing = 0, causality = 0, violations = 0, events = 0, prefixes = 0, rejected = 0;
  for (int k = 0; k < 50; ++k) {
    const auto res = realtime::simulate(testing::micro_stream(6, 10, 9000 + static_cast<std::uint64_t>(k)),
                                        testing::exact_or_cws);
    events += static_cast<long>(res.events.size());
    rejected += static_cast<long>(res.rejected.size());
    for (std::size_t e = 0; e < res.frozen.size(); ++e) {
      for (const auto& pre : res.frozen[e]) {
        ++prefixes;
        const auto bytes = io::dump(nlohmann::json{{"op", pre.op_id}, {"visits", pre.visits}, {"starts", pre.starts}});
        for (std::size_t later = e + 1; later < res.plans.size(); ++later) {
          bool found = false;
          for (const auto& r : res.plans[later].routes) {
            if (r.op_id != pre.op_id || r.visits.size() < pre.visits.size()) continue;
            const std::vector<int> v(r.visits.begin(), r.visits.begin() + static_cast<std::ptrdiff_t>(pre.visits.size()));
            const std::vector<double> s(r.start_times.begin(),
                                        r.start_times.begin() + static_cast<std::ptrdiff_t>(pre.starts.size()));
            if (io::dump(nlohmann::json{{"op", r.op_id}, {"visits", v}, {"starts", s}}) == bytes) found = true;
          }
          if (!found) ++frozen_missing;
        }
      }
    }
    for (const auto& r : res.solution.routes) {
      for (std::size_t v = 0; v < r.visits.size(); ++v) {
        if (r.start_times[v] < res.reveal_time[static_cast<std::size_t>(r.visits[v] - 1)]) ++causality;
      }
    }
    violations += static_cast<long>(milp::check_solution(res.instance, res.solution).violations.size());
  }
  const double secs = since(t0);
  return {frozen_missing == 0 && causality == 0 && violations == 0 && secs <= 300.0,
          fmt("50 AGH6->10 streams, %ld events, %ld frozen prefixes: %ld altered later, %ld causality breaks, "
              "%ld checker violations, %ld rejected reveals; %.1f s (limit 300)",
              events, prefixes, frozen_missing, causality, violations, rejected, secs)};
}

int sh(const fs::path& dir, const std::string& args, const std::string& tag) {
  const std::string cmd = "cd '" + dir.string() + "' && '" AGH_BIN "' " + args + " > stdout_" + tag +
                          ".txt 2> /dev/null";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Outcome determinism() {
  const std::vector<std::pair<std::string, std::string>> cmds{
    {"gen", "--seed 7 --deterministic gen --n 20 -o inst.json"},
    {"gen_small", "--seed 8 --deterministic gen --n 4 -o small.json"},
    {"gen_stream", "--seed 9 --deterministic gen --n 10 --initial 6 -o init.json --stream-out stream.json"},
    {"train", "--seed 4 --deterministic train --config t.ini --out model.bin --log log.csv"},
    {"nn", "--seed 3 --deterministic solve --instance inst.json --solver nn -o nn.json"},
    {"cws", "--seed 3 --deterministic solve --instance inst.json --solver cws -o cws.json"},
    {"ins", "--seed 3 --deterministic solve --instance inst.json --solver insertion:random -o ins.json"},
    {"sa", "--seed 3 --deterministic solve --instance inst.json --solver sa -o sa.json"},
    {"lns", "--seed 3 --deterministic solve --instance inst.json --solver lns -o lns.json"},
    {"lnssa", "--seed 3 --deterministic solve --instance inst.json --solver lns-sa -o lnssa.json"},
    {"oracle", "--seed 3 --deterministic solve --instance small.json --solver oracle -o oracle.json"},
    {"greedy", "--seed 3 --deterministic solve --instance inst.json --solver policy:model.bin -o greedy.json"},
    {"sample", "--seed 3 --deterministic solve --instance inst.json --solver policy:model.bin --samples 16 -o sample.json"},
    {"check", "--deterministic check --instance inst.json --solution lns.json"},
    {"lp", "--deterministic export-lp --instance small.json -o small.lp"},
    {"bench", "--seed 5 --deterministic --threads 2 bench --generate 6 --n 10 --solvers nn,cws,sa,lns "
              "--out bench.csv --per-instance bench_rows.csv"},
    {"realtime", "--seed 6 --deterministic realtime --initial init.json --stream stream.json --solver lns "
                 "--log events.csv -o rt.json --final-instance rt_inst.json"},
    {"plots_train", "--deterministic plots --csv log.csv --out-dir plots_train"},
    {"plots_bench", "--deterministic plots --csv bench.csv --out-dir plots_bench"}};
  std::vector<fs::path> dirs;
  std::string failed;
  for (const char* run : {"run_a", "run_b"}) {
    const auto d = g_workdir / "determinism" / run;
    fs::remove_all(d);
    fs::create_directories(d);
    io::write_text(d / "t.ini", "[train]\nepochs = 2\niters_per_epoch = 3\nbatch = 4\nval_size = 4\n"
                                "[policy]\nd_h = 16\nn_layers = 1\nn_heads = 2\nff_hidden = 32\n"
                                "[gen]\nn_flights = 6\n");
    for (const auto& [tag, args] : cmds) {
      if (sh(d, args, tag) != 0 && failed.empty()) failed = tag;
    }
    dirs.push_back(d);
  }
  int files = 0, differ = 0;
  std::string first;
  for (const auto& e : fs::recursive_directory_iterator(dirs[0])) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), dirs[0]);
    ++files;
    const auto other = dirs[1] / rel;
    if (!fs::exists(other) || io::read_text(e.path()) != io::read_text(other)) {
      ++differ;
      if (first.empty()) first = rel.string();
    }
  }
  return {failed.empty() && differ == 0 && files > static_cast<int>(cmds.size()),
          fmt("%zu commands run twice, %d files compared, %d differ%s%s", cmds.size(), files, differ,
              first.empty() ? "" : (" (first: " + first + ")").c_str(),
              failed.empty() ? "" : ("; command failed: " + failed).c_str())};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Criterion> kCriteria{
  {1, "feasibility suite", feasibility},
  {2, "oracle dominance and enumeration equality", oracle_dominance},
  {3, "gradient correctness", gradients},
  {4, "masking and probability invariants", masking},
  {5, "time-window propagation", windows},
  {6, "classical ordering at desk scale", table_ordering},
  {7, "learning signal", learning},
  {8, "sampling improves on greedy", sampling},
  {9, "real-time correctness", realtime_streams},
  {10, "determinism", determinism}};

} // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: agh_acceptance <workdir> [criterion...]\n";
    return 2;
  }
  g_workdir = argv[1];
  fs::create_directories(g_workdir);
  std::set<int> wanted;
  for (int k = 2; k < argc; ++k) wanted.insert(std::atoi(argv[k]));
  bool all = true;
  for (const auto& c : kCriteria) {
    if (!wanted.empty() && !wanted.contains(c.id)) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << "criterion " << c.id << " [PRIMARY] " << c.name << ": " << (o.pass ? "PASS" : "FAIL") << " - "
              << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
