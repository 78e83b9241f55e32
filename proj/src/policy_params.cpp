#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "agh/model.h"
#include "agh/policy.h"

namespace agh::policy {

namespace {

constexpr char kMagic[4] = {'A', 'G', 'H', 'P'};
constexpr std::uint32_t kVersion = 1;

const char* const kLayerNames[kPerLayer] = {"wq", "wk", "wv", "wo", "w0", "b0",
                                            "w1", "b1", "bn1_g", "bn1_b", "bn2_g", "bn2_b"};
const char* const kDecoderNames[6] = {"glimpse_wq", "glimpse_wk", "glimpse_wv",
                                      "glimpse_wo", "score_wq", "score_wk"};
const char* const kLstmNames[3] = {"lstm_wx", "lstm_wh", "lstm_b"};

void validate(const PolicyConfig& c) {
  if (c.d_h < 1 || c.n_layers < 0 || c.n_heads < 1 || c.ff_hidden < 1 || c.n_gate_rows < 1 ||
      c.n_fleets < 1) {
    throw InputError("policy config: sizes must be positive");
  }
  if (c.d_h % c.n_heads != 0) {
    throw InputError("policy config: d_h must be divisible by the number of heads");
  }
  if (c.lstm && !c.time_windows) {
    throw InputError("policy config: the recurrent window encoder needs time windows");
  }
}

template <class T>
void put(std::string& out, const T& v) {
  const char* p = reinterpret_cast<const char*>(&v);
  out.append(p, p + sizeof(T));
}

template <class T>
T take(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) {
    throw InputError("policy file truncated");
  }
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

void put_matrix(std::string& out, const Mat& m) {
  put<std::int32_t>(out, static_cast<std::int32_t>(m.rows()));
  put<std::int32_t>(out, static_cast<std::int32_t>(m.cols()));
  const char* p = reinterpret_cast<const char*>(m.data());
  out.append(p, p + sizeof(double) * static_cast<std::size_t>(m.size()));
}

Mat take_matrix(const std::string& in, std::size_t& pos, Eigen::Index rows, Eigen::Index cols) {
  const auto r = take<std::int32_t>(in, pos);
  const auto c = take<std::int32_t>(in, pos);
  if (r != rows || c != cols) {
    throw InputError("policy file: array shape does not match its header");
  }
  Mat m(rows, cols);
  const std::size_t bytes = sizeof(double) * static_cast<std::size_t>(m.size());
  if (pos + bytes > in.size()) {
    throw InputError("policy file truncated");
  }
  std::memcpy(m.data(), in.data() + pos, bytes);
  pos += bytes;
  return m;
}

} // namespace

int layer_tensor(const PolicyConfig&, int layer, LayerTensor which) {
  return kLayerBase + layer * kPerLayer + static_cast<int>(which);
}

int decoder_tensor(const PolicyConfig& cfg, DecoderTensor which) {
  return kLayerBase + cfg.n_layers * kPerLayer + static_cast<int>(which);
}

int lstm_tensor(const PolicyConfig& cfg, LstmTensor which) {
  return decoder_tensor(cfg, kScoreWk) + 1 + static_cast<int>(which);
}

PolicyParams PolicyParams::init(const PolicyConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  PolicyParams p;
  p.cfg = cfg;
  const int d = cfg.d_h;
  auto add = [&](std::string name, int rows, int cols) {
    p.names.push_back(std::move(name));
    p.t.emplace_back(rows, cols);
  };
  add("gate_table", cfg.n_gate_rows, d);
  add("fleet_table", cfg.n_fleets, d);
  add("in_w", 3, d);
  add("in_b", 1, d);
  for (int l = 0; l < cfg.n_layers; ++l) {
    const std::string pre = "layer" + std::to_string(l) + ".";
    const int shapes[kPerLayer][2] = {{d, d}, {d, d}, {d, d}, {d, d},
                                      {d, cfg.ff_hidden}, {1, cfg.ff_hidden},
                                      {cfg.ff_hidden, d}, {1, d},
                                      {1, d}, {1, d}, {1, d}, {1, d}};
    for (int k = 0; k < kPerLayer; ++k) {
      add(pre + kLayerNames[k], shapes[k][0], shapes[k][1]);
    }
  }
  add(kDecoderNames[0], 3 * d + 2, d);
  for (int k = 1; k < 6; ++k) add(kDecoderNames[k], d, d);
  if (cfg.lstm) {
    add(kLstmNames[0], 2, 4 * d);
    add(kLstmNames[1], d, 4 * d);
    add(kLstmNames[2], 1, 4 * d);
  }

  std::mt19937_64 rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(d));
  std::uniform_real_distribution<double> u(-bound, bound);
  for (auto& m : p.t) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  }
  // Normalization starts as the identity affine map.
  for (int l = 0; l < cfg.n_layers; ++l) {
    p.t[static_cast<std::size_t>(layer_tensor(cfg, l, kBn1G))].setOnes();
    p.t[static_cast<std::size_t>(layer_tensor(cfg, l, kBn2G))].setOnes();
    p.t[static_cast<std::size_t>(layer_tensor(cfg, l, kBn1B))].setZero();
    p.t[static_cast<std::size_t>(layer_tensor(cfg, l, kBn2B))].setZero();
  }
  for (int k = 0; k < 2 * cfg.n_layers; ++k) {
    p.running_mean.push_back(RowVec::Zero(d));
    p.running_var.push_back(RowVec::Ones(d));
  }
  return p;
}

std::size_t PolicyParams::count() const {
  std::size_t n = 0;
  for (const auto& m : t) n += static_cast<std::size_t>(m.size());
  return n;
}

bool PolicyParams::operator==(const PolicyParams& o) const {
  if (!(cfg == o.cfg) || t.size() != o.t.size() || running_mean.size() != o.running_mean.size()) {
    return false;
  }
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k].rows() != o.t[k].rows() || t[k].cols() != o.t[k].cols() || t[k] != o.t[k]) {
      return false;
    }
  }
  for (std::size_t k = 0; k < running_mean.size(); ++k) {
    if (running_mean[k] != o.running_mean[k] || running_var[k] != o.running_var[k]) return false;
  }
  return true;
}

std::string serialize_params(const PolicyParams& p) {
  std::string out(kMagic, kMagic + 4);
  put<std::uint32_t>(out, kVersion);
  const auto& c = p.cfg;
  for (int v : {c.d_h, c.n_layers, c.n_heads, c.ff_hidden, c.n_gate_rows, c.n_fleets,
                static_cast<int>(c.time_windows), static_cast<int>(c.lstm)}) {
    put<std::int32_t>(out, v);
  }
  put<double>(out, c.c_clip);
  put<double>(out, c.bn_eps);
  put<double>(out, c.bn_momentum);
  for (const auto& m : p.t) put_matrix(out, m);
  for (std::size_t k = 0; k < p.running_mean.size(); ++k) {
    put_matrix(out, p.running_mean[k]);
    put_matrix(out, p.running_var[k]);
  }
  return out;
}

PolicyParams deserialize_params(const std::string& in) {
  if (in.size() < 8 || std::memcmp(in.data(), kMagic, 4) != 0) {
    throw InputError("not a policy parameter file");
  }
  std::size_t pos = 4;
  if (take<std::uint32_t>(in, pos) != kVersion) {
    throw InputError("unsupported policy file version");
  }
  PolicyConfig c;
  c.d_h = take<std::int32_t>(in, pos);
  c.n_layers = take<std::int32_t>(in, pos);
  c.n_heads = take<std::int32_t>(in, pos);
  c.ff_hidden = take<std::int32_t>(in, pos);
  c.n_gate_rows = take<std::int32_t>(in, pos);
  c.n_fleets = take<std::int32_t>(in, pos);
  c.time_windows = take<std::int32_t>(in, pos) != 0;
  c.lstm = take<std::int32_t>(in, pos) != 0;
  c.c_clip = take<double>(in, pos);
  c.bn_eps = take<double>(in, pos);
  c.bn_momentum = take<double>(in, pos);
  PolicyParams p = PolicyParams::init(c, 0);
  for (auto& m : p.t) m = take_matrix(in, pos, m.rows(), m.cols());
  for (std::size_t k = 0; k < p.running_mean.size(); ++k) {
    p.running_mean[k] = take_matrix(in, pos, 1, c.d_h);
    p.running_var[k] = take_matrix(in, pos, 1, c.d_h);
  }
  if (pos != in.size()) {
    throw InputError("policy file has trailing bytes");
  }
  return p;
}

void save_params(const PolicyParams& p, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InputError("cannot write " + path.string());
  }
  const std::string bytes = serialize_params(p);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

PolicyParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot read " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_params(ss.str());
}

Gradient Gradient::zeros_like(const PolicyParams& p) {
  Gradient g;
  for (const auto& m : p.t) g.g.push_back(Mat::Zero(m.rows(), m.cols()));
  return g;
}

void Gradient::add(const Gradient& o, double scale) {
  for (std::size_t k = 0; k < g.size(); ++k) g[k] += scale * o.g[k];
}

} // namespace agh::policy
