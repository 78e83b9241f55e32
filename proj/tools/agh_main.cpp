#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>

#include "agh/bench.h"
#include "agh/io.h"
#include "agh/milp.h"
#include "agh/plots.h"
#include "agh/realtime.h"
#include "agh/solvers.h"
#include "agh/train.h"

using namespace agh;

namespace {

struct Global {
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool deterministic = false;
  int threads = 1;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Solver flags shared by solve, bench and realtime.
struct SolverFlags {
  solvers::Options opts;

  void add(CLI::App* cmd) {
    auto& sa = opts.sa;
    auto& lns = opts.lns;
    cmd->add_option("--samples", opts.samples, "Policy: 1 = greedy, k > 1 = best of k samples");
    cmd->add_option("--sa-neighborhood", sa.neighborhood_size, "SA swap candidates per iteration");
    cmd->add_option("--sa-max-iter", sa.max_iter, "SA iterations");
    cmd->add_option("--sa-t0", sa.t0, "SA initial temperature");
    cmd->add_option("--sa-cooling", sa.cooling, "SA cooling factor");
    cmd->add_option("--sa-time-limit", sa.time_limit, "SA wall-clock limit per sub-problem, s (0 = none)");
    cmd->add_option("--lns-destroy", lns.destroy_fraction, "LNS fraction of flights removed");
    cmd->add_option("--lns-max-iter", lns.max_iter, "LNS iterations");
    cmd->add_option("--lns-iter-time", lns.iter_time_limit, "LNS repair limit, s (0 = none)");
    cmd->add_option("--lns-time-limit", lns.total_time_limit, "LNS wall-clock limit, s (0 = none)");
    cmd->add_option("--lns-t0", lns.t0, "LNS-SA initial temperature");
    cmd->add_option("--lns-cooling", lns.cooling, "LNS-SA cooling factor");
    cmd->add_option("--lns-cooling-every", lns.cooling_every, "LNS-SA iterations between coolings");
    cmd->add_option("--oracle-limit", opts.oracle_limit, "Largest sub-problem the oracle accepts");
  }

  // Wall-clock limits make results depend on machine speed, so
  // deterministic runs rely on iteration caps alone.
  solvers::Options resolved(const Global& g) const {
    auto o = opts;
    o.seed = g.seed;
    if (g.deterministic) {
      o.sa.time_limit = 0.0;
      o.lns.iter_time_limit = 0.0;
      o.lns.total_time_limit = 0.0;
    }
    return o;
  }
};

struct GenFlags {
  std::string config;
  std::optional<int> n, gates, capacity;
  std::optional<std::string> demand, arrival;

  void add(CLI::App* cmd) {
    cmd->add_option("--config", config, "Key-value generator config ([gen], [durations], [speed])");
    cmd->add_option("--n", n, "Number of flights");
    cmd->add_option("--gates", gates, "Number of gates");
    cmd->add_option("--capacity", capacity, "Vehicle capacity (0 = derived from n)");
    cmd->add_option("--demand", demand, "Demand distribution: uniform, gaussian, poisson");
    cmd->add_option("--arrival", arrival, "Arrival distribution: empirical, gaussian, poisson");
  }

  instgen::GenConfig resolved(const Global& g) const {
    instgen::GenConfig cfg;
    if (!config.empty()) cfg.apply(load_config(config));
    if (n) cfg.n_flights = *n;
    if (gates) cfg.n_gates = *gates;
    if (capacity) cfg.capacity = *capacity;
    if (demand) cfg.demand_dist = instgen::parse_demand_dist(*demand);
    if (arrival) cfg.arrival_dist = instgen::parse_arrival_dist(*arrival);
    if (g.seed_set) cfg.seed = g.seed;
    return cfg;
  }
};

milp::WindowSemantics semantics_of(const std::string& name) { return milp::parse_semantics(name); }

int cmd_gen(const Global& g, const GenFlags& gf, const std::string& out, std::optional<int> initial,
            const std::string& stream_out) {
  const auto inst = instgen::generate(gf.resolved(g));
  if (!initial) {
    io::write_text(out, io::dump(io::to_json(inst)));
    std::cout << "flights=" << inst.num_flights() << " ops=" << inst.operations().size() << '\n';
    return 0;
  }
  if (stream_out.empty()) throw InputError("--initial needs --stream-out");
  const auto s = realtime::split(inst, *initial);
  io::write_text(out, io::dump(io::to_json(s.initial)));
  io::write_text(stream_out, io::dump(io::stream_to_json(s.future)));
  std::cout << "initial=" << s.initial.num_flights() << " stream=" << s.future.size() << '\n';
  return 0;
}

int cmd_solve(const Global& g, const SolverFlags& sf, const std::string& instance,
              const std::string& solver, const std::string& out) {
  const auto inst = io::read_instance(instance);
  const auto s = solvers::make(solver, sf.resolved(g));
  if (s.params) solvers::check_compatible(*s.params, inst);
  framework::SolveOptions opts;
  opts.threads = g.threads;
  const auto t0 = std::chrono::steady_clock::now();
  const auto sol = framework::solve(inst, s.solve, opts);
  const double secs = seconds_since(t0);
  if (!out.empty()) io::write_text(out, io::dump(io::to_json(sol)));
  std::cout << "solver=" << s.name << " objective=" << num(sol.objective)
            << " routes=" << sol.routes.size();
  if (!g.deterministic) std::cout << " time_s=" << num(secs);
  std::cout << '\n';
  return 0;
}

int cmd_train(const Global& g, const std::string& config, const std::string& out,
              const std::string& log, const std::string& init, std::optional<int> epochs,
              std::optional<int> iters, std::optional<int> batch, std::optional<std::string> loss) {
  train::TrainConfig cfg;
  if (!config.empty()) cfg.apply(load_config(config));
  if (epochs) cfg.epochs = *epochs;
  if (iters) cfg.iters_per_epoch = *iters;
  if (batch) cfg.batch = *batch;
  if (loss) cfg.loss = train::parse_loss(*loss);
  if (g.seed_set) cfg.seed = g.seed;
  cfg.threads = g.threads;
  std::optional<policy::PolicyParams> start;
  if (!init.empty()) start = policy::load_params(init);
  std::cout << train::log_csv_header() << '\n';
  const auto res = train::train(
    cfg, [](const train::EpochLog& e) { std::cout << train::log_csv_row(e) << std::endl; },
    start ? &*start : nullptr);
  policy::save_params(res.params, out);
  if (!log.empty()) train::write_log_csv(res.log, log);
  return 0;
}

int cmd_bench(const Global& g, const GenFlags& gf, const SolverFlags& sf,
              const std::vector<std::string>& files, int generate,
              const std::vector<std::string>& names, const std::string& out,
              const std::string& per_instance) {
  std::vector<Instance> insts;
  for (const auto& f : files) insts.push_back(io::read_instance(f));
  if (generate > 0) {
    for (auto& inst : train::make_instances(gf.resolved(g), generate, g.seed)) insts.push_back(std::move(inst));
  }
  if (insts.empty()) throw InputError("bench needs --instances or --generate");
  std::vector<solvers::Solver> list;
  const auto opts = sf.resolved(g);
  for (const auto& n : names) list.push_back(solvers::make(n, opts));
  const auto table = bench::run(insts, list, g.threads);
  const auto summary = bench::summarize(table);
  const bool timing = !g.deterministic;
  const auto csv = bench::summary_csv(summary, timing);
  if (!out.empty()) io::write_text(out, csv);
  if (!per_instance.empty()) io::write_text(per_instance, bench::instance_csv(table, timing));
  std::cout << csv;
  int failures = 0;
  for (std::size_t i = 0; i < table.cells.size(); ++i) {
    for (std::size_t s = 0; s < list.size(); ++s) {
      const auto& c = table.cells[i][s];
      if (c.ok) continue;
      ++failures;
      std::cerr << "failed: instance " << i << " solver " << list[s].name << ": " << c.error << '\n';
    }
  }
  return failures ? 3 : 0;
}

int cmd_realtime(const Global& g, const SolverFlags& sf, const std::string& initial,
                 const std::string& stream_file, const std::string& solver, const std::string& log,
                 const std::string& out, const std::string& final_instance, double batch_window) {
  realtime::Stream stream{io::read_instance(initial), io::stream_from_json(io::read_json(stream_file))};
  std::stable_sort(stream.future.begin(), stream.future.end(),
                   [](const Flight& a, const Flight& b) { return a.arrival < b.arrival; });
  const auto s = solvers::make(solver, sf.resolved(g));
  realtime::Options opts;
  opts.batch_window = batch_window;
  opts.threads = g.threads;
  const auto res = realtime::simulate(stream, s.solve, opts);
  if (!log.empty()) io::write_text(log, realtime::events_csv(res.events));
  if (!out.empty()) io::write_text(out, io::dump(io::to_json(res.solution)));
  if (!final_instance.empty()) io::write_text(final_instance, io::dump(io::to_json(res.instance)));
  for (const auto& r : res.rejected) {
    std::cerr << "rejected: stream flight " << r.stream_index << " at t=" << num(r.time) << ": "
              << r.reason << '\n';
  }
  std::cout << "events=" << res.events.size() << " accepted=" << res.instance.num_flights()
            << " rejected=" << res.rejected.size() << " objective=" << num(res.solution.objective)
            << '\n';
  return 0;
}

int cmd_check(const std::string& instance, const std::string& solution, const std::string& sem) {
  const auto inst = io::read_instance(instance);
  const auto sol = io::read_solution(solution);
  const auto report = milp::check_solution(inst, sol, semantics_of(sem));
  for (const auto& v : report.violations) std::cout << v.tag << ": " << v.message << '\n';
  std::cout << (report.ok() ? "ok" : "violated") << " violations=" << report.violations.size()
            << " objective=" << num(report.objective) << '\n';
  return report.ok() ? 0 : 1;
}

int cmd_export_lp(const std::string& instance, const std::string& out, const std::string& sem) {
  milp::BuildOptions opts;
  opts.semantics = semantics_of(sem);
  const auto model = milp::build(io::read_instance(instance), opts);
  io::write_text(out, milp::emit_lp(model));
  std::cout << "vars=" << model.vars.size() << " binaries=" << model.count(milp::VarType::Binary)
            << " constraints=" << model.constraints.size() << '\n';
  return 0;
}

std::string substitute(std::string cmd, const std::string& key, const std::string& value) {
  for (auto pos = cmd.find(key); pos != std::string::npos; pos = cmd.find(key, pos + value.size())) {
    cmd.replace(pos, key.size(), value);
  }
  return cmd;
}

int cmd_solve_milp(const std::string& lp, const std::string& solver_cmd, std::string sol_file,
                   const std::string& instance, const std::string& out) {
  const auto model = milp::parse_lp(io::read_text(lp));
  if (sol_file.empty()) sol_file = lp + ".sol";
  const auto cmd = substitute(substitute(solver_cmd, "{lp}", lp), "{sol}", sol_file);
  const int rc = std::system(cmd.c_str());
  if (rc != 0) {
    std::cerr << "solver command failed with status " << rc << ": " << cmd << '\n';
    return 4;
  }
  const auto values = milp::parse_assignment(model, io::read_text(sol_file));
  const auto bad = milp::violated(model, values);
  for (const auto& name : bad) std::cout << "violated: " << name << '\n';
  std::cout << "objective=" << num(milp::objective_value(model, values)) << " violated=" << bad.size()
            << '\n';
  if (!instance.empty()) {
    const auto inst = io::read_instance(instance);
    const auto sol = milp::solution_from_assignment(inst, model, values);
    if (!out.empty()) io::write_text(out, io::dump(io::to_json(sol)));
  } else if (!out.empty()) {
    throw InputError("-o needs --instance to map the assignment to routes");
  }
  return bad.empty() ? 0 : 1;
}

int cmd_plots(const std::string& csv, const std::string& out_dir) {
  for (const auto& p : plots::render(csv, out_dir)) std::cout << "wrote " << p.string() << '\n';
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Airport ground handling: instance generation, solving, training, benchmarking"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "Seed for every random stream")->each([&](const std::string&) {
    g.seed_set = true;
  });
  app.add_flag("--deterministic", g.deterministic,
               "Byte-identical reruns: no wall-clock limits, no timings in outputs");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);

  GenFlags gen_flags;
  SolverFlags solver_flags;

  auto* gen = app.add_subcommand("gen", "Generate an instance, optionally split into a reveal stream");
  std::string gen_out, stream_out;
  std::optional<int> initial_count;
  gen_flags.add(gen);
  gen->add_option("-o,--out", gen_out, "Instance JSON")->required();
  gen->add_option("--initial", initial_count, "Flights known at time 0; the rest go to --stream-out");
  gen->add_option("--stream-out", stream_out, "Stream JSON of later flights");

  auto* solve = app.add_subcommand("solve", "Solve an instance with the decomposition framework");
  std::string solve_inst, solve_solver = "nn", solve_out;
  solve->add_option("--instance", solve_inst, "Instance JSON")->required();
  solve->add_option("--solver", solve_solver,
                    "nn, cws, insertion:<random|nearest|farthest>, sa, lns, lns-sa, oracle, policy:<file>");
  solve->add_option("-o,--out", solve_out, "Solution JSON");
  solver_flags.add(solve);

  auto* trn = app.add_subcommand("train", "Train the construction policy");
  std::string train_cfg, train_out, train_log, train_init;
  std::optional<int> epochs, iters, batch;
  std::optional<std::string> loss;
  trn->add_option("--config", train_cfg, "Key-value config ([train], [policy], [gen], ...)");
  trn->add_option("--out", train_out, "Parameter file to write")->required();
  trn->add_option("--log", train_log, "Per-epoch CSV log");
  trn->add_option("--init", train_init, "Start from these parameters");
  trn->add_option("--epochs", epochs, "Epochs");
  trn->add_option("--iters", iters, "Iterations per epoch");
  trn->add_option("--batch", batch, "Instances per iteration");
  trn->add_option("--loss", loss, "per_fleet, L_G, L_MG, L_MF");

  auto* bch = app.add_subcommand("bench", "Compare solvers: mean objective, gap to best found, time");
  std::vector<std::string> bench_files, bench_solvers;
  int bench_generate = 0;
  std::string bench_out, bench_per_instance;
  bch->add_option("--instances", bench_files, "Instance JSON files");
  bch->add_option("--generate", bench_generate, "Also generate this many seeded instances");
  bch->add_option("--solvers", bench_solvers, "Comma-separated solver names")->required()->delimiter(',');
  bch->add_option("--out", bench_out, "Summary CSV");
  bch->add_option("--per-instance", bench_per_instance, "Per-instance CSV");
  gen_flags.add(bch);
  solver_flags.add(bch);

  auto* rt = app.add_subcommand("realtime", "Replay a stream of flight reveals with re-optimization");
  std::string rt_initial, rt_stream, rt_solver = "cws", rt_log, rt_out, rt_final;
  double rt_window = 0.0;
  rt->add_option("--initial", rt_initial, "Instance JSON of flights known at time 0")->required();
  rt->add_option("--stream", rt_stream, "Stream JSON of later flights")->required();
  rt->add_option("--solver", rt_solver, "Sub-problem solver");
  rt->add_option("--log", rt_log, "Event CSV");
  rt->add_option("-o,--out", rt_out, "Final solution JSON");
  rt->add_option("--final-instance", rt_final, "Instance JSON of all accepted flights");
  rt->add_option("--batch-window", rt_window, "Reveals this close to the first are handled together (min)");
  solver_flags.add(rt);

  auto* chk = app.add_subcommand("check", "Check a solution against the routing constraints");
  std::string chk_inst, chk_sol, chk_sem = "complete_by_window";
  chk->add_option("--instance", chk_inst, "Instance JSON")->required();
  chk->add_option("--solution", chk_sol, "Solution JSON")->required();
  chk->add_option("--semantics", chk_sem, "complete_by_window or start_in_window");

  auto* lp = app.add_subcommand("export-lp", "Write the instance's MILP in LP format");
  std::string lp_inst, lp_out, lp_sem = "complete_by_window";
  lp->add_option("--instance", lp_inst, "Instance JSON")->required();
  lp->add_option("-o,--out", lp_out, "LP file")->required();
  lp->add_option("--semantics", lp_sem, "complete_by_window or start_in_window");

  auto* sm = app.add_subcommand("solve-milp", "Solve an LP file with an external solver command");
  std::string sm_lp, sm_cmd, sm_sol, sm_inst, sm_out;
  sm->add_option("--lp", sm_lp, "LP file")->required();
  sm->add_option("--solver-cmd", sm_cmd, "Command with {lp} and {sol} placeholders")->required();
  sm->add_option("--sol", sm_sol, "Solution text written by the solver (default <lp>.sol)");
  sm->add_option("--instance", sm_inst, "Instance the LP was built from, to recover routes");
  sm->add_option("-o,--out", sm_out, "Solution JSON");

  auto* pl = app.add_subcommand("plots", "Render SVG plots from a training log or bench summary");
  std::string pl_csv, pl_dir = ".";
  pl->add_option("--csv", pl_csv, "CSV file")->required();
  pl->add_option("--out-dir", pl_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen(g, gen_flags, gen_out, initial_count, stream_out);
    if (*solve) return cmd_solve(g, solver_flags, solve_inst, solve_solver, solve_out);
    if (*trn) return cmd_train(g, train_cfg, train_out, train_log, train_init, epochs, iters, batch, loss);
    if (*bch) {
      return cmd_bench(g, gen_flags, solver_flags, bench_files, bench_generate, bench_solvers,
                       bench_out, bench_per_instance);
    }
    if (*rt) return cmd_realtime(g, solver_flags, rt_initial, rt_stream, rt_solver, rt_log, rt_out, rt_final, rt_window);
    if (*chk) return cmd_check(chk_inst, chk_sol, chk_sem);
    if (*lp) return cmd_export_lp(lp_inst, lp_out, lp_sem);
    if (*sm) return cmd_solve_milp(sm_lp, sm_cmd, sm_sol, sm_inst, sm_out);
    if (*pl) return cmd_plots(pl_csv, pl_dir);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
