#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

#include "agh/framework.h"
#include "agh/heuristics.h"
#include "agh/io.h"
#include "agh/milp.h"
#include "agh/realtime.h"
#include "agh/train.h"

using namespace agh;
namespace fs = std::filesystem;

namespace {

fs::path workdir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("agh_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Runs the CLI inside `dir`; stdout goes to out.txt, stderr to err.txt.
int run(const fs::path& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.string() + "' && '" AGH_BIN "' " + args + " > out.txt 2> err.txt";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string out(const fs::path& dir) { return io::read_text(dir / "out.txt"); }

} // namespace

TEST_CASE("gen, solve and check round trip") {
  const auto d = workdir("roundtrip");
  REQUIRE(run(d, "--seed 7 gen --n 12 --demand uniform --arrival empirical -o inst.json") == 0);
  CHECK(io::read_instance(d / "inst.json").num_flights() == 12);
  for (auto s : {"nn", "cws", "insertion:farthest", "sa --sa-max-iter 5", "lns --lns-max-iter 10",
                 "lns-sa --lns-max-iter 10"}) {
    CAPTURE(s);
    REQUIRE(run(d, std::string("solve --instance inst.json -o sol.json --solver ") + s) == 0);
    CHECK(out(d).find("objective=") != std::string::npos);
    CHECK(run(d, "check --instance inst.json --solution sol.json") == 0);
    CHECK(out(d).rfind("ok violations=0", 0) == 0);
  }
}

TEST_CASE("check exits non-zero on a violated solution") {
  const auto d = workdir("violated");
  REQUIRE(run(d, "--seed 1 gen --n 5 -o inst.json") == 0);
  REQUIRE(run(d, "solve --instance inst.json --solver nn -o sol.json") == 0);
  auto sol = io::read_solution(d / "sol.json");
  sol.routes.pop_back();
  io::write_text(d / "bad.json", io::dump(io::to_json(sol)));
  CHECK(run(d, "check --instance inst.json --solution bad.json") == 1);
  CHECK(out(d).find("serve:") != std::string::npos);
}

TEST_CASE("input errors exit non-zero") {
  const auto d = workdir("errors");
  CHECK(run(d, "solve --instance missing.json") != 0);
  REQUIRE(run(d, "--seed 1 gen --n 10 -o inst.json") == 0);
  CHECK(run(d, "solve --instance inst.json --solver tabu") == 2);
  CHECK(run(d, "solve --instance inst.json --solver oracle") == 2);
  CHECK(run(d, "bogus") != 0);
  CHECK(run(d, "") != 0);
  io::write_text(d / "empty.csv", "");
  CHECK(run(d, "plots --csv empty.csv --out-dir plots") == 2);
  CHECK_FALSE(fs::exists(d / "plots"));
}

TEST_CASE("bench flags failures and still writes its table") {
  const auto d = workdir("bench");
  CHECK(run(d, "--seed 3 --deterministic bench --generate 3 --n 9 --solvers nn,cws,oracle --out b.csv") == 3);
  const auto csv = io::read_text(d / "b.csv");
  CHECK(csv.find("oracle,0,3,NA,NA,NA") != std::string::npos);
  CHECK(run(d, "--seed 3 --deterministic bench --generate 3 --n 9 --solvers cws --out c.csv") == 0);
  CHECK(io::read_text(d / "c.csv").find("cws,3,0,") != std::string::npos);
  CHECK(run(d, "plots --csv b.csv --out-dir p") == 0);
  CHECK(fs::exists(d / "p" / "gap_bars.svg"));
}

TEST_CASE("realtime replays a generated stream") {
  const auto d = workdir("realtime");
  REQUIRE(run(d, "--seed 5 gen --n 10 --initial 6 -o init.json --stream-out stream.json") == 0);
  REQUIRE(run(d, "realtime --initial init.json --stream stream.json --solver cws --log ev.csv "
                 "-o final.json --final-instance all.json") == 0);
  CHECK(io::read_text(d / "ev.csv").rfind("time,revealed,rejected,frozen,pending,objective,incremental_cost\n", 0) == 0);
  CHECK(run(d, "check --instance all.json --solution final.json") == 0);
}

TEST_CASE("solve-milp maps an external assignment back to routes") {
  const auto d = workdir("milp");
  REQUIRE(run(d, "--seed 2 gen --n 3 -o inst.json") == 0);
  REQUIRE(run(d, "export-lp --instance inst.json -o model.lp") == 0);
  const auto inst = io::read_instance(d / "inst.json");
  milp::BuildOptions bo;
  bo.semantics = milp::WindowSemantics::CompleteByWindow;
  const auto m = milp::build(inst, bo);
  const auto sol = framework::solve(inst, heuristics::cws);
  const auto values = milp::induced_assignment(inst, m, sol);
  std::string text;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] != 0.0) text += m.vars[k].name + " " + std::to_string(values[k]) + "\n";
  }
  io::write_text(d / "known.sol", text);
  REQUIRE(run(d, "solve-milp --lp model.lp --solver-cmd \"cp known.sol {sol}\" --instance inst.json -o s.json") == 0);
  CHECK(out(d).find("violated=0") != std::string::npos);
  CHECK(run(d, "check --instance inst.json --solution s.json") == 0);
  CHECK(io::read_solution(d / "s.json").objective == doctest::Approx(sol.objective));
  CHECK(run(d, "solve-milp --lp model.lp --solver-cmd \"false\"") == 4);
  io::write_text(d / "zero.sol", "");
  CHECK(run(d, "solve-milp --lp model.lp --solver-cmd \"cp zero.sol {sol}\"") == 1);
}

TEST_CASE("train writes parameters that solve accepts") {
  const auto d = workdir("train");
  io::write_text(d / "t.ini", "[train]\nepochs = 2\niters_per_epoch = 2\nbatch = 3\nval_size = 3\n"
                              "[policy]\nd_h = 8\nn_layers = 1\nn_heads = 2\nff_hidden = 16\n"
                              "[gen]\nn_flights = 5\n");
  REQUIRE(run(d, "--seed 4 train --config t.ini --out model.bin --log log.csv") == 0);
  CHECK(out(d).rfind("epoch,train_mean_cost", 0) == 0);
  REQUIRE(run(d, "--seed 9 gen --n 5 -o inst.json") == 0);
  CHECK(run(d, "solve --instance inst.json --solver policy:model.bin -o g.json") == 0);
  CHECK(run(d, "check --instance inst.json --solution g.json") == 0);
  CHECK(run(d, "solve --instance inst.json --solver policy:model.bin --samples 8 -o s.json") == 0);
  CHECK(run(d, "check --instance inst.json --solution s.json") == 0);
  CHECK(run(d, "plots --csv log.csv --out-dir p") == 0);
  CHECK(fs::exists(d / "p" / "objective_vs_epoch.svg"));
}

TEST_CASE("shipped configs load and restate the defaults") {
  const auto d = workdir("configs");
  REQUIRE(run(d, "--seed 3 gen --n 20 -o plain.json") == 0);
  REQUIRE(run(d, "--seed 3 gen --config '" AGH_DATA_DIR "/gen_default.ini' -o config.json") == 0);
  CHECK(io::read_text(d / "plain.json") == io::read_text(d / "config.json"));
  train::TrainConfig defaults, loaded;
  loaded.apply(load_config(AGH_DATA_DIR "/train_agh10.ini"));
  CHECK(loaded.epochs == defaults.epochs);
  CHECK(loaded.iters_per_epoch == defaults.iters_per_epoch);
  CHECK(loaded.batch == defaults.batch);
  CHECK(loaded.lr == defaults.lr);
  CHECK(loaded.loss == defaults.loss);
  CHECK(loaded.policy == defaults.policy);
  CHECK(loaded.gen.n_flights == defaults.gen.n_flights);
}
