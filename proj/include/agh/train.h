#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "agh/config.h"
#include "agh/framework.h"
#include "agh/instgen.h"
#include "agh/policy.h"

namespace agh::train {

// per_fleet: own advantage per fleet. L_G: the global advantage for every
// fleet. L_MG: alpha * own + (1 - alpha) * global. L_MF: alpha * own +
// (1 - alpha) * sum of advantages of fleets at later precedence levels.
enum class Loss { PerFleet, Global, MixGlobal, MixFleet };

Loss parse_loss(const std::string& name);
std::string to_string(Loss loss);

struct TrainConfig {
  int epochs = 20;
  int iters_per_epoch = 50;
  int batch = 32;
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double t_test_alpha = 0.05;
  Loss loss = Loss::PerFleet;
  double mix_alpha = 0.95;
  int val_size = 100;
  instgen::GenConfig gen = [] {
    instgen::GenConfig g;
    g.n_flights = 10;
    return g;
  }();
  policy::PolicyConfig policy;
  std::uint64_t seed = 1;
  int threads = 1;

  // "[train]" and "[policy]" sections; "[gen]", "[durations]" and "[speed]"
  // go to the instance generator.
  void apply(const Config& cfg);
  void validate() const;
};

// Policy shaped for instances produced by `gen`.
policy::PolicyConfig policy_config_for(policy::PolicyConfig base, const instgen::GenConfig& gen);

class Adam {
public:
  Adam() = default;
  Adam(const policy::PolicyParams& p, double lr, double beta1, double beta2, double eps);
  // Descent step on the loss whose gradient is `grad`.
  void step(policy::PolicyParams& p, const policy::Gradient& grad);
  long steps() const { return t_; }

private:
  std::vector<policy::Mat> m_, v_;
  long t_ = 0;
  double lr_ = 1e-4, b1_ = 0.9, b2_ = 0.999, eps_ = 1e-8;
};

framework::SubSolver greedy_solver(const policy::PolicyParams& p);
// Best of k samples; the seed stream of a sub-problem is (seed, op_id).
framework::SubSolver sampling_solver(const policy::PolicyParams& p, int k, std::uint64_t seed);

// Cost of every fleet in op order of the instance.
std::vector<double> fleet_costs(const Instance& inst, const framework::RunResult& run);

// Sampled episodes of one training batch, grouped per operation.
struct FleetBatch {
  int op_id = 0;
  int level = 0;
  std::vector<SubProblem> subs;          // one per instance
  std::vector<std::vector<int>> actions; // sampled episodes
  std::vector<double> cost;              // L_i^f
  std::vector<double> baseline;          // B_i^f
};

struct BatchRecord {
  std::vector<FleetBatch> fleets; // solve order (level, then op id)
  int batch_size() const { return fleets.empty() ? 0 : static_cast<int>(fleets.front().subs.size()); }
};

// Samples every instance through the framework with the current policy,
// normalizing each fleet's sub-problems over the batch. Running statistics
// are updated. baseline_costs[i] is fleet_costs() of instance i under the
// baseline policy.
BatchRecord sample_batch(policy::PolicyParams& p, const std::vector<Instance>& instances,
                         const std::vector<std::vector<double>>& baseline_costs,
                         std::uint64_t seed, int threads = 1);

// Advantage weight per fleet and instance ([fleet][instance]).
std::vector<std::vector<double>> advantages(const BatchRecord& rec, Loss loss, double mix_alpha);

// Gradient of (1 / (B * F)) * sum_f sum_i A_i^f log pi(a_i^f) (1 / B for
// L_G), accumulated fleet-major, instance-minor.
policy::Gradient policy_gradient(policy::PolicyParams& p, const BatchRecord& rec, Loss loss,
                                 double mix_alpha);

struct TTest {
  double mean_diff = 0.0; // mean of current - baseline
  double t = 0.0;
  double p_value = 1.0;   // one-sided: current lower than baseline
};

// Paired one-sided t-test of current < baseline. Zero variance: p = 0 if
// every difference favors the current policy, else p = 1.
TTest paired_t_test(const std::vector<double>& current, const std::vector<double>& baseline);

// Summed greedy cost per instance.
std::vector<double> greedy_costs(const policy::PolicyParams& p, const std::vector<Instance>& insts,
                                 int threads = 1);

struct EpochLog {
  int epoch = 0;
  double train_cost = 0.0;    // mean sampled cost over the epoch
  double val_cost = 0.0;      // current policy, greedy, validation set
  double baseline_cost = 0.0; // baseline policy on the same set
  double p_value = 1.0;
  bool swapped = false;
};

struct TrainResult {
  policy::PolicyParams params;
  policy::PolicyParams baseline;
  std::vector<EpochLog> log;
};

// Parameters training starts from when no initial parameters are given.
policy::PolicyParams initial_params(const TrainConfig& cfg);

std::vector<Instance> make_instances(const instgen::GenConfig& gen, int count, std::uint64_t seed);

// Runs the REINFORCE loop with a greedy rollout baseline. `on_epoch` sees
// each log row as it is produced.
TrainResult train(const TrainConfig& cfg, std::function<void(const EpochLog&)> on_epoch = {},
                  const policy::PolicyParams* init = nullptr);

void write_log_csv(const std::vector<EpochLog>& log, const std::filesystem::path& path);
std::string log_csv_header();
std::string log_csv_row(const EpochLog& e);

} // namespace agh::train
