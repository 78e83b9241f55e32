#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "agh/env.h"
#include "agh/subproblem.h"

namespace agh::policy {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVec = Eigen::Matrix<double, 1, Eigen::Dynamic>;

struct PolicyConfig {
  int d_h = 128;
  int n_layers = 3;
  int n_heads = 8;
  int ff_hidden = 512;
  double c_clip = 10.0;
  int n_gate_rows = 92; // depot + gates
  int n_fleets = 10;
  bool time_windows = true; // false: the "w/o TW" ablation drops a, b
  bool lstm = false;        // recurrent encoding of the window history
  double bn_eps = 1e-5;
  double bn_momentum = 0.1;

  bool operator==(const PolicyConfig&) const = default;
};

// Trainable arrays (see tensor ids below) plus batch-norm running
// statistics. Weight matrices are stored input-major (x * W).
struct PolicyParams {
  PolicyConfig cfg;
  std::vector<Mat> t;
  std::vector<std::string> names;
  std::vector<RowVec> running_mean; // two per encoder layer
  std::vector<RowVec> running_var;

  static PolicyParams init(const PolicyConfig& cfg, std::uint64_t seed);

  std::size_t count() const; // number of scalar parameters

  bool operator==(const PolicyParams& o) const;
};

// Tensor ids.
inline constexpr int kGateTable = 0;
inline constexpr int kFleetTable = 1;
inline constexpr int kInW = 2;
inline constexpr int kInB = 3;
inline constexpr int kLayerBase = 4;
inline constexpr int kPerLayer = 12;
enum LayerTensor { kWq, kWk, kWv, kWo, kW0, kB0, kW1, kB1, kBn1G, kBn1B, kBn2G, kBn2B };
enum DecoderTensor { kGlimpseWq, kGlimpseWk, kGlimpseWv, kGlimpseWo, kScoreWq, kScoreWk };
enum LstmTensor { kLstmWx, kLstmWh, kLstmB };

int layer_tensor(const PolicyConfig& cfg, int layer, LayerTensor which);
int decoder_tensor(const PolicyConfig& cfg, DecoderTensor which);
int lstm_tensor(const PolicyConfig& cfg, LstmTensor which);

void save_params(const PolicyParams& p, const std::filesystem::path& path);
PolicyParams load_params(const std::filesystem::path& path);
std::string serialize_params(const PolicyParams& p);
PolicyParams deserialize_params(const std::string& bytes);

// Gradient with the shapes of PolicyParams::t.
struct Gradient {
  std::vector<Mat> g;
  static Gradient zeros_like(const PolicyParams& p);
  void add(const Gradient& o, double scale = 1.0);
};

// Batch statistics (training) or running averages (inference).
enum class NormMode { Batch, Running };

// Encoder output of one sub-problem plus decoder projections that stay
// fixed during a rollout.
struct Encoding {
  Mat h;          // (n + 1) x d_h node embeddings
  RowVec h_mean;  // graph embedding
  Mat glimpse_k;  // node keys / values of the glimpse
  Mat glimpse_v;
  Mat score_k;    // node keys of the final scoring head
  RowVec q_fixed; // glimpse query part from graph and fleet embeddings
};

// Encodes a batch of sub-problems. In Batch mode normalization statistics
// are shared by all nodes of the batch; update_running also folds them
// into the running averages.
std::vector<Encoding> encode(PolicyParams& p, const std::vector<const SubProblem*>& subs,
                             NormMode mode, bool update_running = false);
std::vector<Encoding> encode(const PolicyParams& p, const std::vector<const SubProblem*>& subs);

// Action probabilities at a state (0 on masked nodes).
std::vector<double> decode_step(const PolicyParams& p, const Encoding& enc,
                                const env::RolloutState& s, const std::vector<char>& mask,
                                std::vector<double>* scores = nullptr);

enum class Decode { Greedy, Sample };

struct Rollout {
  std::vector<int> actions;
  double log_prob = 0.0;
  double cost = 0.0;
};

Rollout rollout(const PolicyParams& p, const SubProblem& sub, const Encoding& enc, Decode mode,
                std::uint64_t seed);
// Encodes with running statistics, then rolls out.
Rollout rollout(const PolicyParams& p, const SubProblem& sub, Decode mode, std::uint64_t seed);

// Cheapest of k sampled rollouts; sample i uses seed stream (seed, i).
Rollout sample_best(const PolicyParams& p, const SubProblem& sub, int k, std::uint64_t seed);
std::uint64_t sample_seed(std::uint64_t seed, int index);

// Sum_i weight_i * log pi(actions_i) over a batch, with its gradient added
// to `grad`. The forward pass is recomputed with the given normalization
// mode, so Batch mode reproduces the statistics used while sampling.
double accumulate_grad(PolicyParams& p, const std::vector<const SubProblem*>& subs,
                       const std::vector<std::vector<int>>& actions,
                       const std::vector<double>& weights, NormMode mode, Gradient& grad);

// Same objective without the gradient.
double weighted_log_prob(PolicyParams& p, const std::vector<const SubProblem*>& subs,
                         const std::vector<std::vector<int>>& actions,
                         const std::vector<double>& weights, NormMode mode);

} // namespace agh::policy
