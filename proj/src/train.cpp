#include "agh/train.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "agh/parallel.h"

namespace agh::train {

namespace {

constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kValStream = 2;
constexpr std::uint64_t kSampleStream = 3;
constexpr std::uint64_t kInitStream = 4;

template <class T>
void read(const Config& cfg, const char* key, T& out) {
  if (auto v = cfg.get_optional<T>(key)) out = *v;
}

} // namespace

Loss parse_loss(const std::string& name) {
  if (name == "per_fleet") return Loss::PerFleet;
  if (name == "L_G") return Loss::Global;
  if (name == "L_MG") return Loss::MixGlobal;
  if (name == "L_MF") return Loss::MixFleet;
  throw InputError("unknown loss '" + name + "' (per_fleet, L_G, L_MG, L_MF)");
}

std::string to_string(Loss loss) {
  switch (loss) {
  case Loss::PerFleet: return "per_fleet";
  case Loss::Global: return "L_G";
  case Loss::MixGlobal: return "L_MG";
  case Loss::MixFleet: return "L_MF";
  }
  return "per_fleet";
}

void TrainConfig::apply(const Config& cfg) {
  read(cfg, "train.epochs", epochs);
  read(cfg, "train.iters_per_epoch", iters_per_epoch);
  read(cfg, "train.batch", batch);
  read(cfg, "train.lr", lr);
  read(cfg, "train.beta1", beta1);
  read(cfg, "train.beta2", beta2);
  read(cfg, "train.adam_eps", adam_eps);
  read(cfg, "train.t_test_alpha", t_test_alpha);
  read(cfg, "train.mix_alpha", mix_alpha);
  read(cfg, "train.val_size", val_size);
  read(cfg, "train.seed", seed);
  read(cfg, "train.threads", threads);
  if (auto v = cfg.get_optional<std::string>("train.loss")) loss = parse_loss(*v);
  read(cfg, "policy.d_h", policy.d_h);
  read(cfg, "policy.n_layers", policy.n_layers);
  read(cfg, "policy.n_heads", policy.n_heads);
  read(cfg, "policy.ff_hidden", policy.ff_hidden);
  read(cfg, "policy.c_clip", policy.c_clip);
  read(cfg, "policy.time_windows", policy.time_windows);
  read(cfg, "policy.lstm", policy.lstm);
  gen.apply(cfg);
}

void TrainConfig::validate() const {
  if (epochs < 1 || iters_per_epoch < 1 || batch < 1 || val_size < 2 || threads < 1) {
    throw InputError("train config: epochs, iters_per_epoch, batch, threads must be positive and "
                     "val_size at least 2");
  }
  if (!(lr > 0.0) || !(t_test_alpha > 0.0 && t_test_alpha < 1.0)) {
    throw InputError("train config: lr must be positive and t_test_alpha in (0, 1)");
  }
  if (!(mix_alpha >= 0.0 && mix_alpha <= 1.0)) {
    throw InputError("train config: mix_alpha must lie in [0, 1]");
  }
}

policy::PolicyConfig policy_config_for(policy::PolicyConfig base, const instgen::GenConfig& gen) {
  base.n_gate_rows = gen.n_gates + 1;
  base.n_fleets = static_cast<int>(
    gen.operations.empty() ? instgen::default_operations().size() : gen.operations.size());
  return base;
}

Adam::Adam(const policy::PolicyParams& p, double lr, double beta1, double beta2, double eps)
  : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {
  for (const auto& m : p.t) {
    m_.push_back(policy::Mat::Zero(m.rows(), m.cols()));
    v_.push_back(policy::Mat::Zero(m.rows(), m.cols()));
  }
}

void Adam::step(policy::PolicyParams& p, const policy::Gradient& grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < p.t.size(); ++k) {
    const auto& g = grad.g[k];
    m_[k] = b1_ * m_[k] + (1.0 - b1_) * g;
    v_[k] = b2_ * v_[k] + (1.0 - b2_) * g.cwiseProduct(g);
    p.t[k].array() -= lr_ * (m_[k].array() / c1) / ((v_[k].array() / c2).sqrt() + eps_);
  }
}

framework::SubSolver greedy_solver(const policy::PolicyParams& p) {
  return [&p](const SubProblem& sub) {
    return from_actions(sub, policy::rollout(p, sub, policy::Decode::Greedy, 0).actions);
  };
}

framework::SubSolver sampling_solver(const policy::PolicyParams& p, int k, std::uint64_t seed) {
  return [&p, k, seed](const SubProblem& sub) {
    const auto s = mix_seed(seed, static_cast<std::uint64_t>(sub.op_id));
    return from_actions(sub, policy::sample_best(p, sub, k, s).actions);
  };
}

std::vector<double> fleet_costs(const Instance& inst, const framework::RunResult& run) {
  std::vector<double> out(inst.operations().size(), 0.0);
  for (const auto& plan : run.plans) {
    out[static_cast<std::size_t>(inst.fleet_index(plan.sub.op_id))] +=
      solution_cost(plan.sub, plan.routes);
  }
  return out;
}

BatchRecord sample_batch(policy::PolicyParams& p, const std::vector<Instance>& instances,
                         const std::vector<std::vector<double>>& baseline_costs,
                         std::uint64_t seed, int threads) {
  const int n = static_cast<int>(instances.size());
  if (n == 0 || baseline_costs.size() != instances.size()) {
    throw InputError("sample_batch: need one baseline cost vector per instance");
  }
  std::vector<framework::Stepper> steppers;
  steppers.reserve(instances.size());
  for (const auto& inst : instances) steppers.emplace_back(inst);

  BatchRecord rec;
  while (!steppers.front().done()) {
    std::vector<std::vector<SubProblem>> posed;
    for (auto& s : steppers) posed.push_back(s.pose());
    const std::size_t n_ops = posed.front().size();
    std::vector<std::vector<framework::FleetPlan>> plans(instances.size());
    for (std::size_t k = 0; k < n_ops; ++k) {
      FleetBatch fb;
      fb.op_id = posed.front()[k].op_id;
      fb.level = posed.front()[k].level;
      for (int i = 0; i < n; ++i) {
        auto& sub = posed[static_cast<std::size_t>(i)][k];
        if (sub.op_id != fb.op_id) {
          throw InputError("sample_batch: instances must share their operations");
        }
        fb.subs.push_back(sub);
      }
      std::vector<const SubProblem*> ptrs;
      for (const auto& s : fb.subs) ptrs.push_back(&s);
      const auto enc = policy::encode(p, ptrs, policy::NormMode::Batch, true);
      const std::uint64_t fleet_seed = mix_seed(seed, rec.fleets.size());
      fb.actions.resize(static_cast<std::size_t>(n));
      fb.cost.resize(static_cast<std::size_t>(n));
      const auto& cp = p;
      parallel_for(n, threads, [&](int i) {
        const auto r = policy::rollout(cp, fb.subs[static_cast<std::size_t>(i)],
                                       enc[static_cast<std::size_t>(i)], policy::Decode::Sample,
                                       mix_seed(fleet_seed, static_cast<std::uint64_t>(i)));
        fb.actions[static_cast<std::size_t>(i)] = r.actions;
        fb.cost[static_cast<std::size_t>(i)] = r.cost;
      });
      for (int i = 0; i < n; ++i) {
        const auto& inst = instances[static_cast<std::size_t>(i)];
        fb.baseline.push_back(baseline_costs[static_cast<std::size_t>(i)]
                                            [static_cast<std::size_t>(inst.fleet_index(fb.op_id))]);
        framework::FleetPlan plan;
        plan.sub = std::move(posed[static_cast<std::size_t>(i)][k]);
        plan.routes = from_actions(plan.sub, fb.actions[static_cast<std::size_t>(i)]);
        plans[static_cast<std::size_t>(i)].push_back(std::move(plan));
      }
      rec.fleets.push_back(std::move(fb));
    }
    for (int i = 0; i < n; ++i) {
      steppers[static_cast<std::size_t>(i)].commit(std::move(plans[static_cast<std::size_t>(i)]));
    }
  }
  return rec;
}

std::vector<std::vector<double>> advantages(const BatchRecord& rec, Loss loss, double mix_alpha) {
  const std::size_t n_f = rec.fleets.size();
  const std::size_t n = static_cast<std::size_t>(rec.batch_size());
  std::vector<std::vector<double>> own(n_f, std::vector<double>(n));
  std::vector<double> global(n, 0.0);
  for (std::size_t f = 0; f < n_f; ++f) {
    for (std::size_t i = 0; i < n; ++i) {
      own[f][i] = rec.fleets[f].cost[i] - rec.fleets[f].baseline[i];
      global[i] += own[f][i];
    }
  }
  if (loss == Loss::PerFleet) return own;
  std::vector<std::vector<double>> out(n_f, std::vector<double>(n));
  for (std::size_t f = 0; f < n_f; ++f) {
    for (std::size_t i = 0; i < n; ++i) {
      switch (loss) {
      case Loss::Global:
        out[f][i] = global[i];
        break;
      case Loss::MixGlobal:
        out[f][i] = mix_alpha * own[f][i] + (1.0 - mix_alpha) * global[i];
        break;
      case Loss::MixFleet: {
        double later = 0.0;
        for (std::size_t g = 0; g < n_f; ++g) {
          if (rec.fleets[g].level > rec.fleets[f].level) later += own[g][i];
        }
        out[f][i] = mix_alpha * own[f][i] + (1.0 - mix_alpha) * later;
        break;
      }
      case Loss::PerFleet:
        break;
      }
    }
  }
  return out;
}

policy::Gradient policy_gradient(policy::PolicyParams& p, const BatchRecord& rec, Loss loss,
                                 double mix_alpha) {
  auto grad = policy::Gradient::zeros_like(p);
  if (rec.fleets.empty()) return grad;
  const auto adv = advantages(rec, loss, mix_alpha);
  // L_G differentiates the log-probability of the whole solution, so it has
  // no per-fleet average.
  const double scale = loss == Loss::Global
                         ? 1.0 / static_cast<double>(rec.batch_size())
                         : 1.0 / (static_cast<double>(rec.batch_size()) * rec.fleets.size());
  for (std::size_t f = 0; f < rec.fleets.size(); ++f) {
    const auto& fb = rec.fleets[f];
    std::vector<const SubProblem*> ptrs;
    for (const auto& s : fb.subs) ptrs.push_back(&s);
    std::vector<double> w;
    for (double a : adv[f]) w.push_back(a * scale);
    policy::accumulate_grad(p, ptrs, fb.actions, w, policy::NormMode::Batch, grad);
  }
  return grad;
}

TTest paired_t_test(const std::vector<double>& current, const std::vector<double>& baseline) {
  if (current.size() != baseline.size() || current.size() < 2) {
    throw InputError("paired t-test needs two equally long samples of size >= 2");
  }
  const std::size_t n = current.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = current[i] - baseline[i];
  TTest r;
  r.mean_diff = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double x : d) ss += (x - r.mean_diff) * (x - r.mean_diff);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0) {
    const bool all_better = std::all_of(d.begin(), d.end(), [](double x) { return x < 0.0; });
    r.t = all_better ? -std::numeric_limits<double>::infinity() : 0.0;
    r.p_value = all_better ? 0.0 : 1.0;
    return r;
  }
  r.t = r.mean_diff / (sd / std::sqrt(static_cast<double>(n)));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  r.p_value = boost::math::cdf(dist, r.t);
  return r;
}

std::vector<double> greedy_costs(const policy::PolicyParams& p, const std::vector<Instance>& insts,
                                 int threads) {
  std::vector<double> out(insts.size());
  const auto solver = greedy_solver(p);
  parallel_for(static_cast<int>(insts.size()), threads, [&](int i) {
    out[static_cast<std::size_t>(i)] =
      framework::solve(insts[static_cast<std::size_t>(i)], solver).objective;
  });
  return out;
}

std::vector<Instance> make_instances(const instgen::GenConfig& gen, int count, std::uint64_t seed) {
  std::vector<Instance> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    auto g = gen;
    g.seed = mix_seed(seed, static_cast<std::uint64_t>(i));
    out.push_back(instgen::generate(g));
  }
  return out;
}

policy::PolicyParams initial_params(const TrainConfig& cfg) {
  return policy::PolicyParams::init(policy_config_for(cfg.policy, cfg.gen), mix_seed(cfg.seed, kInitStream));
}

TrainResult train(const TrainConfig& cfg, std::function<void(const EpochLog&)> on_epoch,
                  const policy::PolicyParams* init) {
  cfg.validate();
  const auto pcfg = policy_config_for(cfg.policy, cfg.gen);
  TrainResult res;
  if (init) {
    if (init->cfg.n_gate_rows < pcfg.n_gate_rows || init->cfg.n_fleets < pcfg.n_fleets) {
      throw InputError("initial parameters do not cover the generator's gates and fleets");
    }
    res.params = *init;
  } else {
    res.params = initial_params(cfg);
  }
  auto& p = res.params;
  res.baseline = p;
  Adam adam(p, cfg.lr, cfg.beta1, cfg.beta2, cfg.adam_eps);

  std::uint64_t val_round = 0;
  auto val_set = [&] {
    return make_instances(cfg.gen, cfg.val_size, mix_seed(mix_seed(cfg.seed, kValStream), val_round));
  };
  auto val = val_set();

  std::uint64_t iter = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    double train_sum = 0.0;
    for (int it = 0; it < cfg.iters_per_epoch; ++it, ++iter) {
      const auto insts =
        make_instances(cfg.gen, cfg.batch, mix_seed(mix_seed(cfg.seed, kTrainStream), iter));
      std::vector<std::vector<double>> base(insts.size());
      const auto solver = greedy_solver(res.baseline);
      parallel_for(cfg.batch, cfg.threads, [&](int i) {
        const auto& inst = insts[static_cast<std::size_t>(i)];
        base[static_cast<std::size_t>(i)] = fleet_costs(inst, framework::run(inst, solver));
      });
      const auto rec =
        sample_batch(p, insts, base, mix_seed(mix_seed(cfg.seed, kSampleStream), iter), cfg.threads);
      double batch_cost = 0.0;
      for (const auto& fb : rec.fleets) {
        batch_cost += std::accumulate(fb.cost.begin(), fb.cost.end(), 0.0);
      }
      train_sum += batch_cost / cfg.batch;
      adam.step(p, policy_gradient(p, rec, cfg.loss, cfg.mix_alpha));
    }

    EpochLog log;
    log.epoch = epoch;
    log.train_cost = train_sum / cfg.iters_per_epoch;
    const auto cur = greedy_costs(p, val, cfg.threads);
    const auto bl = greedy_costs(res.baseline, val, cfg.threads);
    log.val_cost = std::accumulate(cur.begin(), cur.end(), 0.0) / static_cast<double>(cur.size());
    log.baseline_cost = std::accumulate(bl.begin(), bl.end(), 0.0) / static_cast<double>(bl.size());
    const auto tt = paired_t_test(cur, bl);
    log.p_value = tt.p_value;
    if (tt.mean_diff < 0.0 && tt.p_value < cfg.t_test_alpha) {
      log.swapped = true;
      res.baseline = p;
      ++val_round;
      val = val_set();
    }
    res.log.push_back(log);
    if (on_epoch) on_epoch(log);
  }
  return res;
}

std::string log_csv_header() {
  return "epoch,train_mean_cost,val_mean_cost,baseline_mean_cost,p_value,baseline_swapped";
}

std::string log_csv_row(const EpochLog& e) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.6f,%.6g,%d", e.epoch, e.train_cost, e.val_cost,
                e.baseline_cost, e.p_value, e.swapped ? 1 : 0);
  return buf;
}

void write_log_csv(const std::vector<EpochLog>& log, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write " + path.string());
  }
  out << log_csv_header() << "\n";
  for (const auto& e : log) out << log_csv_row(e) << "\n";
}

} // namespace agh::train
