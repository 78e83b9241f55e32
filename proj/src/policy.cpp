#include "agh/policy.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "agh/parallel.h"

namespace agh::policy {

namespace {

const Mat& tensor(const PolicyParams& p, int id) { return p.t[static_cast<std::size_t>(id)]; }
Mat& slot(Gradient& g, int id) { return g.g[static_cast<std::size_t>(id)]; }

struct Layout {
  std::vector<int> off;
  std::vector<int> len;
  int total = 0;
};

Layout layout_of(const std::vector<const SubProblem*>& subs) {
  Layout l;
  for (const auto* s : subs) {
    l.off.push_back(l.total);
    l.len.push_back(s->size() + 1);
    l.total += s->size() + 1;
  }
  return l;
}

RowVec sigmoid(const RowVec& x) { return (1.0 / (1.0 + (-x.array()).exp())).matrix(); }

struct LstmStep {
  RowVec x, h_prev, c_prev, i, f, g, o, c, tc;
};

struct LayerCache {
  Mat x, q, k, v;
  std::vector<Mat> attn; // (instance, head) row-major
  Mat ocat, xhat1, hhat, pre, act, xhat2;
  RowVec inv1, inv2;
};

struct EncoderCache {
  Mat feats;                 // N x 3
  std::vector<int> gate_row; // gate-table row per node
  std::vector<std::vector<LstmStep>> lstm;
  std::vector<LayerCache> layers;
};

// Normalizes z in place into y; returns xhat and the inverse std used.
void norm_forward(PolicyParams& p, int stat, const Mat& z, NormMode mode, bool update_running,
                  const RowVec& gamma, const RowVec& beta, Mat& y, Mat* xhat_out,
                  RowVec* inv_out) {
  const double eps = p.cfg.bn_eps;
  RowVec mean;
  RowVec inv;
  if (mode == NormMode::Batch) {
    mean = z.colwise().mean();
    const Mat centered = z.rowwise() - mean;
    const RowVec var = centered.array().square().colwise().mean().matrix();
    inv = (var.array() + eps).rsqrt().matrix();
    if (update_running) {
      const double m = p.cfg.bn_momentum;
      const double n = static_cast<double>(z.rows());
      const double unbias = n > 1.0 ? n / (n - 1.0) : 1.0;
      auto& rm = p.running_mean[static_cast<std::size_t>(stat)];
      auto& rv = p.running_var[static_cast<std::size_t>(stat)];
      rm = (1.0 - m) * rm + m * mean;
      rv = (1.0 - m) * rv + (m * unbias) * var;
    }
  } else {
    mean = p.running_mean[static_cast<std::size_t>(stat)];
    inv = (p.running_var[static_cast<std::size_t>(stat)].array() + eps).rsqrt().matrix();
  }
  Mat xhat = (z.rowwise() - mean).array().rowwise() * inv.array();
  y = (xhat.array().rowwise() * gamma.array()).rowwise() + beta.array();
  if (xhat_out) *xhat_out = std::move(xhat);
  if (inv_out) *inv_out = std::move(inv);
}

// Gradient through the normalization; dy is replaced by dz.
void norm_backward(NormMode mode, const Mat& xhat, const RowVec& inv, const RowVec& gamma,
                   Mat& dy, Mat& dgamma, Mat& dbeta) {
  dgamma += (dy.array() * xhat.array()).colwise().sum().matrix();
  dbeta += dy.colwise().sum();
  const Mat dxhat = dy.array().rowwise() * gamma.array();
  if (mode == NormMode::Running) {
    dy = dxhat.array().rowwise() * inv.array();
    return;
  }
  const double n = static_cast<double>(xhat.rows());
  const RowVec sum_d = dxhat.colwise().sum();
  const RowVec sum_dx = (dxhat.array() * xhat.array()).colwise().sum().matrix();
  Mat t = (n * dxhat).rowwise() - sum_d;
  t -= (xhat.array().rowwise() * sum_dx.array()).matrix();
  dy = (t.array().rowwise() * (inv.array() / n)).matrix();
}

RowVec lstm_forward(const PolicyParams& p, const SubProblem& sub, const SubFlight& f,
                    std::vector<LstmStep>* steps) {
  const int d = p.cfg.d_h;
  const Mat& wx = tensor(p, lstm_tensor(p.cfg, kLstmWx));
  const Mat& wh = tensor(p, lstm_tensor(p.cfg, kLstmWh));
  const Mat& b = tensor(p, lstm_tensor(p.cfg, kLstmB));
  RowVec h = RowVec::Zero(d);
  RowVec c = RowVec::Zero(d);
  for (const auto& w : f.window_history) {
    LstmStep st;
    st.x.resize(2);
    st.x << w[0] / sub.horizon, w[1] / sub.horizon;
    const RowVec a = st.x * wx + h * wh + b;
    st.i = sigmoid(a.segment(0, d));
    st.f = sigmoid(a.segment(d, d));
    st.g = a.segment(2 * d, d).array().tanh().matrix();
    st.o = sigmoid(a.segment(3 * d, d));
    st.h_prev = h;
    st.c_prev = c;
    c = (st.f.array() * c.array() + st.i.array() * st.g.array()).matrix();
    st.c = c;
    st.tc = c.array().tanh().matrix();
    h = (st.o.array() * st.tc.array()).matrix();
    if (steps) steps->push_back(std::move(st));
  }
  return h;
}

void lstm_backward(const PolicyParams& p, const std::vector<LstmStep>& steps, RowVec dh,
                   Gradient& g) {
  const int d = p.cfg.d_h;
  const Mat& wh = tensor(p, lstm_tensor(p.cfg, kLstmWh));
  Mat& dwx = slot(g, lstm_tensor(p.cfg, kLstmWx));
  Mat& dwh = slot(g, lstm_tensor(p.cfg, kLstmWh));
  Mat& db = slot(g, lstm_tensor(p.cfg, kLstmB));
  RowVec dc = RowVec::Zero(d);
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    const auto& s = *it;
    const auto tca = s.tc.array();
    dc = (dc.array() + dh.array() * s.o.array() * (1.0 - tca.square())).matrix();
    RowVec da(4 * d);
    da.segment(0, d) = (dc.array() * s.g.array() * s.i.array() * (1.0 - s.i.array())).matrix();
    da.segment(d, d) =
      (dc.array() * s.c_prev.array() * s.f.array() * (1.0 - s.f.array())).matrix();
    da.segment(2 * d, d) = (dc.array() * s.i.array() * (1.0 - s.g.array().square())).matrix();
    da.segment(3 * d, d) = (dh.array() * tca * s.o.array() * (1.0 - s.o.array())).matrix();
    dwx += s.x.transpose() * da;
    dwh += s.h_prev.transpose() * da;
    db += da;
    dh = da * wh.transpose();
    dc = (dc.array() * s.f.array()).matrix();
  }
}

Mat input_forward(const PolicyParams& p, const std::vector<const SubProblem*>& subs,
                  const Layout& lay, EncoderCache* cache) {
  const auto& cfg = p.cfg;
  const Mat& gates = tensor(p, kGateTable);
  const Mat& w = tensor(p, kInW);
  const Mat& b = tensor(p, kInB);
  Mat h0(lay.total, cfg.d_h);
  Mat feats = Mat::Zero(lay.total, 3);
  std::vector<int> gate_row(static_cast<std::size_t>(lay.total), 0);
  if (cache) cache->lstm.assign(static_cast<std::size_t>(lay.total), {});
  for (std::size_t i = 0; i < subs.size(); ++i) {
    const auto& sub = *subs[i];
    const int base = lay.off[i];
    h0.row(base) = gates.row(kDepotGate);
    for (int node = 1; node <= sub.size(); ++node) {
      const auto& f = sub.flight(node);
      const int r = base + node;
      if (f.gate < 0 || f.gate >= gates.rows()) {
        throw InputError("gate " + std::to_string(f.gate) + " outside the policy's gate table");
      }
      gate_row[static_cast<std::size_t>(r)] = f.gate;
      feats(r, 0) = sub.normalized_demand(node);
      if (cfg.time_windows && !cfg.lstm) {
        feats(r, 1) = f.window_start / sub.horizon;
        feats(r, 2) = f.window_end / sub.horizon;
      }
      h0.row(r) = gates.row(f.gate) + feats.row(r) * w + b;
      if (cfg.lstm) {
        h0.row(r) += lstm_forward(p, sub, f,
                                  cache ? &cache->lstm[static_cast<std::size_t>(r)] : nullptr);
      }
    }
  }
  if (cache) {
    cache->feats = std::move(feats);
    cache->gate_row = std::move(gate_row);
  }
  return h0;
}

Mat encoder_forward(PolicyParams& p, const std::vector<const SubProblem*>& subs,
                    const Layout& lay, NormMode mode, bool update_running, EncoderCache* cache) {
  const auto& cfg = p.cfg;
  const int d = cfg.d_h;
  const int heads = cfg.n_heads;
  const int dk = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  Mat h = input_forward(p, subs, lay, cache);
  if (cache) cache->layers.resize(static_cast<std::size_t>(cfg.n_layers));
  for (int l = 0; l < cfg.n_layers; ++l) {
    auto W = [&](LayerTensor which) -> const Mat& { return tensor(p, layer_tensor(cfg, l, which)); };
    Mat q = h * W(kWq);
    Mat k = h * W(kWk);
    Mat v = h * W(kWv);
    Mat ocat(lay.total, d);
    std::vector<Mat> attn;
    for (std::size_t i = 0; i < subs.size(); ++i) {
      const int o = lay.off[i];
      const int s = lay.len[i];
      for (int m = 0; m < heads; ++m) {
        Mat a = scale * (q.block(o, m * dk, s, dk) * k.block(o, m * dk, s, dk).transpose());
        for (int r = 0; r < s; ++r) {
          const double mx = a.row(r).maxCoeff();
          a.row(r) = (a.row(r).array() - mx).exp().matrix();
          a.row(r) /= a.row(r).sum();
        }
        ocat.block(o, m * dk, s, dk) = a * v.block(o, m * dk, s, dk);
        if (cache) attn.push_back(std::move(a));
      }
    }
    const Mat z1 = h + ocat * W(kWo);
    Mat hhat;
    Mat xhat1;
    RowVec inv1;
    norm_forward(p, 2 * l, z1, mode, update_running, W(kBn1G), W(kBn1B), hhat, &xhat1, &inv1);
    Mat pre = (hhat * W(kW0)).rowwise() + RowVec(W(kB0));
    Mat act = pre.cwiseMax(0.0);
    const Mat z2 = hhat + ((act * W(kW1)).rowwise() + RowVec(W(kB1)));
    Mat out;
    Mat xhat2;
    RowVec inv2;
    norm_forward(p, 2 * l + 1, z2, mode, update_running, W(kBn2G), W(kBn2B), out, &xhat2, &inv2);
    if (cache) {
      auto& c = cache->layers[static_cast<std::size_t>(l)];
      c.x = std::move(h);
      c.q = std::move(q);
      c.k = std::move(k);
      c.v = std::move(v);
      c.attn = std::move(attn);
      c.ocat = std::move(ocat);
      c.xhat1 = std::move(xhat1);
      c.inv1 = std::move(inv1);
      c.hhat = std::move(hhat);
      c.pre = std::move(pre);
      c.act = std::move(act);
      c.xhat2 = std::move(xhat2);
      c.inv2 = std::move(inv2);
    }
    h = std::move(out);
  }
  return h;
}

void encoder_backward(const PolicyParams& p, const std::vector<const SubProblem*>& subs,
                      const Layout& lay, NormMode mode, const EncoderCache& cache, Mat dh,
                      Gradient& g) {
  const auto& cfg = p.cfg;
  const int d = cfg.d_h;
  const int heads = cfg.n_heads;
  const int dk = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  for (int l = cfg.n_layers - 1; l >= 0; --l) {
    const auto& c = cache.layers[static_cast<std::size_t>(l)];
    auto W = [&](LayerTensor which) -> const Mat& { return tensor(p, layer_tensor(cfg, l, which)); };
    auto G = [&](LayerTensor which) -> Mat& { return slot(g, layer_tensor(cfg, l, which)); };
    // dh becomes dz2.
    norm_backward(mode, c.xhat2, c.inv2, W(kBn2G), dh, G(kBn2G), G(kBn2B));
    G(kW1) += c.act.transpose() * dh;
    G(kB1) += dh.colwise().sum();
    Mat dpre = (dh * W(kW1).transpose()).cwiseProduct((c.pre.array() > 0.0).cast<double>().matrix());
    G(kW0) += c.hhat.transpose() * dpre;
    G(kB0) += dpre.colwise().sum();
    Mat dz1 = dh + dpre * W(kW0).transpose();
    norm_backward(mode, c.xhat1, c.inv1, W(kBn1G), dz1, G(kBn1G), G(kBn1B));
    G(kWo) += c.ocat.transpose() * dz1;
    const Mat docat = dz1 * W(kWo).transpose();
    Mat dq = Mat::Zero(lay.total, d);
    Mat dk_ = Mat::Zero(lay.total, d);
    Mat dv = Mat::Zero(lay.total, d);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < subs.size(); ++i) {
      const int o = lay.off[i];
      const int s = lay.len[i];
      for (int m = 0; m < heads; ++m, ++idx) {
        const Mat& a = c.attn[idx];
        const Mat dout = docat.block(o, m * dk, s, dk);
        const Mat da = dout * c.v.block(o, m * dk, s, dk).transpose();
        dv.block(o, m * dk, s, dk) += a.transpose() * dout;
        Mat ds = a.cwiseProduct(da);
        const Eigen::VectorXd rows = ds.rowwise().sum();
        ds -= (a.array().colwise() * rows.array()).matrix();
        ds *= scale;
        dq.block(o, m * dk, s, dk) += ds * c.k.block(o, m * dk, s, dk);
        dk_.block(o, m * dk, s, dk) += ds.transpose() * c.q.block(o, m * dk, s, dk);
      }
    }
    G(kWq) += c.x.transpose() * dq;
    G(kWk) += c.x.transpose() * dk_;
    G(kWv) += c.x.transpose() * dv;
    dh = dz1 + dq * W(kWq).transpose() + dk_ * W(kWk).transpose() + dv * W(kWv).transpose();
  }
  // Input embedding.
  Mat& dgates = slot(g, kGateTable);
  Mat& dw = slot(g, kInW);
  Mat& db = slot(g, kInB);
  for (std::size_t i = 0; i < subs.size(); ++i) {
    const int base = lay.off[i];
    dgates.row(kDepotGate) += dh.row(base);
    for (int node = 1; node < lay.len[i]; ++node) {
      const int r = base + node;
      dgates.row(cache.gate_row[static_cast<std::size_t>(r)]) += dh.row(r);
      dw += cache.feats.row(r).transpose() * dh.row(r);
      db += dh.row(r);
      if (cfg.lstm) lstm_backward(p, cache.lstm[static_cast<std::size_t>(r)], dh.row(r), g);
    }
  }
}

Encoding make_encoding(const PolicyParams& p, const SubProblem& sub, Mat h) {
  const auto& cfg = p.cfg;
  const int d = cfg.d_h;
  const Mat& wq = tensor(p, decoder_tensor(cfg, kGlimpseWq));
  if (sub.fleet_index < 0 || sub.fleet_index >= cfg.n_fleets) {
    throw InputError("fleet index outside the policy's fleet table");
  }
  Encoding e;
  e.h_mean = h.colwise().mean();
  e.glimpse_k = h * tensor(p, decoder_tensor(cfg, kGlimpseWk));
  e.glimpse_v = h * tensor(p, decoder_tensor(cfg, kGlimpseWv));
  e.score_k = h * tensor(p, decoder_tensor(cfg, kScoreWk));
  e.q_fixed = e.h_mean * wq.topRows(d) +
              tensor(p, kFleetTable).row(sub.fleet_index) * wq.middleRows(d, d);
  e.h = std::move(h);
  return e;
}

struct StepCache {
  RowVec h_last;
  double cap = 0.0;
  double ft = 0.0;
  RowVec qg;
  std::vector<int> cand;
  std::vector<std::vector<double>> attn; // per head over cand
  RowVec gcat, hc, qf;
  std::vector<double> tanh_z; // per cand
  std::vector<double> prob;   // per cand
};

RowVec last_embedding(const PolicyParams& p, const Encoding& enc, const env::RolloutState& s) {
  if (s.last_node >= 0) return enc.h.row(s.last_node);
  return tensor(p, kGateTable).row(s.last_gate);
}

void step_forward(const PolicyParams& p, const Encoding& enc, const env::RolloutState& s,
                  const std::vector<char>& mask, StepCache& c) {
  const auto& cfg = p.cfg;
  const int d = cfg.d_h;
  const int heads = cfg.n_heads;
  const int dk = d / heads;
  const double gscale = 1.0 / std::sqrt(static_cast<double>(dk));
  const double sscale = 1.0 / std::sqrt(static_cast<double>(d));
  const Mat& wq = tensor(p, decoder_tensor(cfg, kGlimpseWq));
  c.cand.clear();
  for (int j = 0; j < static_cast<int>(mask.size()); ++j) {
    if (mask[static_cast<std::size_t>(j)]) c.cand.push_back(j);
  }
  if (c.cand.empty()) {
    throw InputError("no selectable action");
  }
  c.h_last = last_embedding(p, enc, s);
  c.cap = s.capacity_left();
  c.ft = s.clock / s.sub->horizon;
  c.qg = enc.q_fixed + c.h_last * wq.middleRows(2 * d, d) + c.cap * wq.row(3 * d) +
         c.ft * wq.row(3 * d + 1);
  const std::size_t nc = c.cand.size();
  c.attn.assign(static_cast<std::size_t>(heads), std::vector<double>(nc));
  c.gcat = RowVec::Zero(d);
  for (int m = 0; m < heads; ++m) {
    auto& a = c.attn[static_cast<std::size_t>(m)];
    const auto qm = c.qg.segment(m * dk, dk);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < nc; ++t) {
      a[t] = gscale * qm.dot(enc.glimpse_k.row(c.cand[t]).segment(m * dk, dk));
      mx = std::max(mx, a[t]);
    }
    double sum = 0.0;
    for (auto& x : a) {
      x = std::exp(x - mx);
      sum += x;
    }
    for (std::size_t t = 0; t < nc; ++t) {
      a[t] /= sum;
      c.gcat.segment(m * dk, dk) += a[t] * enc.glimpse_v.row(c.cand[t]).segment(m * dk, dk);
    }
  }
  c.hc = c.gcat * tensor(p, decoder_tensor(cfg, kGlimpseWo));
  c.qf = c.hc * tensor(p, decoder_tensor(cfg, kScoreWq));
  c.tanh_z.resize(nc);
  c.prob.resize(nc);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < nc; ++t) {
    c.tanh_z[t] = std::tanh(sscale * c.qf.dot(enc.score_k.row(c.cand[t])));
    c.prob[t] = cfg.c_clip * c.tanh_z[t];
    mx = std::max(mx, c.prob[t]);
  }
  double sum = 0.0;
  for (auto& x : c.prob) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (auto& x : c.prob) x /= sum;
}

struct DecoderGrad {
  Mat dk, dv, dsk; // per instance node gradients of the decoder keys/values
  RowVec dq_fixed;
};

// Backpropagates weight * log p(action) of one step.
void step_backward(const PolicyParams& p, const Encoding& enc, const env::RolloutState& s,
                   const StepCache& c, int action, double weight, DecoderGrad& dg, Mat& dh,
                   Gradient& g) {
  const auto& cfg = p.cfg;
  const int d = cfg.d_h;
  const int heads = cfg.n_heads;
  const int dk = d / heads;
  const double gscale = 1.0 / std::sqrt(static_cast<double>(dk));
  const double sscale = 1.0 / std::sqrt(static_cast<double>(d));
  const std::size_t nc = c.cand.size();
  RowVec dqf = RowVec::Zero(d);
  for (std::size_t t = 0; t < nc; ++t) {
    const double dscore = weight * ((c.cand[t] == action ? 1.0 : 0.0) - c.prob[t]);
    const double dz = dscore * cfg.c_clip * (1.0 - c.tanh_z[t] * c.tanh_z[t]) * sscale;
    dqf += dz * enc.score_k.row(c.cand[t]);
    dg.dsk.row(c.cand[t]) += dz * c.qf;
  }
  const Mat& wsq = tensor(p, decoder_tensor(cfg, kScoreWq));
  const Mat& wgo = tensor(p, decoder_tensor(cfg, kGlimpseWo));
  const Mat& wgq = tensor(p, decoder_tensor(cfg, kGlimpseWq));
  slot(g, decoder_tensor(cfg, kScoreWq)) += c.hc.transpose() * dqf;
  const RowVec dhc = dqf * wsq.transpose();
  slot(g, decoder_tensor(cfg, kGlimpseWo)) += c.gcat.transpose() * dhc;
  const RowVec dgcat = dhc * wgo.transpose();
  RowVec dqg = RowVec::Zero(d);
  std::vector<double> da(nc);
  for (int m = 0; m < heads; ++m) {
    const auto& a = c.attn[static_cast<std::size_t>(m)];
    const auto dgm = dgcat.segment(m * dk, dk);
    double dot = 0.0;
    for (std::size_t t = 0; t < nc; ++t) {
      da[t] = dgm.dot(enc.glimpse_v.row(c.cand[t]).segment(m * dk, dk));
      dot += a[t] * da[t];
      dg.dv.row(c.cand[t]).segment(m * dk, dk) += a[t] * dgm;
    }
    const auto qm = c.qg.segment(m * dk, dk);
    for (std::size_t t = 0; t < nc; ++t) {
      const double du = a[t] * (da[t] - dot) * gscale;
      dqg.segment(m * dk, dk) += du * enc.glimpse_k.row(c.cand[t]).segment(m * dk, dk);
      dg.dk.row(c.cand[t]).segment(m * dk, dk) += du * qm;
    }
  }
  dg.dq_fixed += dqg;
  Mat& dwgq = slot(g, decoder_tensor(cfg, kGlimpseWq));
  dwgq.middleRows(2 * d, d) += c.h_last.transpose() * dqg;
  dwgq.row(3 * d) += c.cap * dqg;
  dwgq.row(3 * d + 1) += c.ft * dqg;
  const RowVec dlast = dqg * wgq.middleRows(2 * d, d).transpose();
  if (s.last_node >= 0) {
    dh.row(s.last_node) += dlast;
  } else {
    slot(g, kGateTable).row(s.last_gate) += dlast;
  }
}

double batch_objective(PolicyParams& p, const std::vector<const SubProblem*>& subs,
                       const std::vector<std::vector<int>>& actions,
                       const std::vector<double>& weights, NormMode mode, Gradient* grad) {
  if (actions.size() != subs.size() || weights.size() != subs.size()) {
    throw InputError("batch sizes differ");
  }
  const auto& cfg = p.cfg;
  const int d = cfg.d_h;
  const Layout lay = layout_of(subs);
  EncoderCache cache;
  const Mat h = encoder_forward(p, subs, lay, mode, false, grad ? &cache : nullptr);
  Mat dh_all;
  if (grad) dh_all = Mat::Zero(lay.total, d);
  double total = 0.0;
  for (std::size_t i = 0; i < subs.size(); ++i) {
    const auto& sub = *subs[i];
    const int o = lay.off[i];
    const int s = lay.len[i];
    const Encoding enc = make_encoding(p, sub, h.middleRows(o, s));
    DecoderGrad dg;
    Mat dh;
    if (grad) {
      dg.dk = Mat::Zero(s, d);
      dg.dv = Mat::Zero(s, d);
      dg.dsk = Mat::Zero(s, d);
      dg.dq_fixed = RowVec::Zero(d);
      dh = Mat::Zero(s, d);
    }
    auto st = env::reset(sub);
    StepCache c;
    double lp = 0.0;
    for (int a : actions[i]) {
      const auto mask = env::feasible_mask(st);
      step_forward(p, enc, st, mask, c);
      const auto it = std::find(c.cand.begin(), c.cand.end(), a);
      if (it == c.cand.end()) {
        throw InputError("action " + std::to_string(a) + " is masked");
      }
      lp += std::log(c.prob[static_cast<std::size_t>(it - c.cand.begin())]);
      if (grad && weights[i] != 0.0) step_backward(p, enc, st, c, a, weights[i], dg, dh, *grad);
      env::apply(st, a, mask);
    }
    if (!st.done()) {
      throw InputError("incomplete action sequence");
    }
    total += weights[i] * lp;
    if (!grad || weights[i] == 0.0) continue;
    Gradient& g = *grad;
    const Mat& wgq = tensor(p, decoder_tensor(cfg, kGlimpseWq));
    slot(g, decoder_tensor(cfg, kGlimpseWk)) += enc.h.transpose() * dg.dk;
    slot(g, decoder_tensor(cfg, kGlimpseWv)) += enc.h.transpose() * dg.dv;
    slot(g, decoder_tensor(cfg, kScoreWk)) += enc.h.transpose() * dg.dsk;
    dh += dg.dk * tensor(p, decoder_tensor(cfg, kGlimpseWk)).transpose() +
          dg.dv * tensor(p, decoder_tensor(cfg, kGlimpseWv)).transpose() +
          dg.dsk * tensor(p, decoder_tensor(cfg, kScoreWk)).transpose();
    Mat& dwgq = slot(g, decoder_tensor(cfg, kGlimpseWq));
    dwgq.topRows(d) += enc.h_mean.transpose() * dg.dq_fixed;
    const RowVec dmean = dg.dq_fixed * wgq.topRows(d).transpose();
    dh.rowwise() += dmean / static_cast<double>(s);
    dwgq.middleRows(d, d) +=
      tensor(p, kFleetTable).row(sub.fleet_index).transpose() * dg.dq_fixed;
    slot(g, kFleetTable).row(sub.fleet_index) += dg.dq_fixed * wgq.middleRows(d, d).transpose();
    dh_all.middleRows(o, s) += dh;
  }
  if (grad) encoder_backward(p, subs, lay, mode, cache, std::move(dh_all), *grad);
  return total;
}

} // namespace

std::vector<Encoding> encode(PolicyParams& p, const std::vector<const SubProblem*>& subs,
                             NormMode mode, bool update_running) {
  const Layout lay = layout_of(subs);
  const Mat h = encoder_forward(p, subs, lay, mode, update_running, nullptr);
  std::vector<Encoding> out;
  out.reserve(subs.size());
  for (std::size_t i = 0; i < subs.size(); ++i) {
    out.push_back(make_encoding(p, *subs[i], h.middleRows(lay.off[i], lay.len[i])));
  }
  return out;
}

std::vector<Encoding> encode(const PolicyParams& p, const std::vector<const SubProblem*>& subs) {
  // Running-statistics mode reads but never writes the parameters.
  return encode(const_cast<PolicyParams&>(p), subs, NormMode::Running, false);
}

std::vector<double> decode_step(const PolicyParams& p, const Encoding& enc,
                                const env::RolloutState& s, const std::vector<char>& mask,
                                std::vector<double>* scores) {
  StepCache c;
  step_forward(p, enc, s, mask, c);
  std::vector<double> probs(mask.size(), 0.0);
  if (scores) scores->assign(mask.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t t = 0; t < c.cand.size(); ++t) {
    probs[static_cast<std::size_t>(c.cand[t])] = c.prob[t];
    if (scores) (*scores)[static_cast<std::size_t>(c.cand[t])] = p.cfg.c_clip * c.tanh_z[t];
  }
  return probs;
}

Rollout rollout(const PolicyParams& p, const SubProblem& sub, const Encoding& enc, Decode mode,
                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Rollout r;
  auto st = env::reset(sub);
  StepCache c;
  while (!st.done()) {
    const auto mask = env::feasible_mask(st);
    step_forward(p, enc, st, mask, c);
    std::size_t pick = 0;
    if (mode == Decode::Greedy) {
      for (std::size_t t = 1; t < c.cand.size(); ++t) {
        if (c.prob[t] > c.prob[pick]) pick = t;
      }
    } else {
      const double u = unit(rng);
      double acc = 0.0;
      pick = c.cand.size() - 1;
      for (std::size_t t = 0; t < c.cand.size(); ++t) {
        acc += c.prob[t];
        if (u < acc) {
          pick = t;
          break;
        }
      }
      // Never land on a zero-probability tail entry through rounding.
      while (pick > 0 && c.prob[pick] == 0.0) --pick;
    }
    const int a = c.cand[pick];
    r.log_prob += std::log(c.prob[pick]);
    r.actions.push_back(a);
    env::apply(st, a, mask);
  }
  r.cost = env::tour_cost(sub, r.actions);
  return r;
}

Rollout rollout(const PolicyParams& p, const SubProblem& sub, Decode mode, std::uint64_t seed) {
  const auto enc = encode(p, {&sub});
  return rollout(p, sub, enc.front(), mode, seed);
}

std::uint64_t sample_seed(std::uint64_t seed, int index) {
  return mix_seed(seed, static_cast<std::uint64_t>(index));
}

Rollout sample_best(const PolicyParams& p, const SubProblem& sub, int k, std::uint64_t seed) {
  if (k < 1) {
    throw InputError("sample count must be positive");
  }
  const auto enc = encode(p, {&sub});
  Rollout best;
  for (int i = 0; i < k; ++i) {
    Rollout r = rollout(p, sub, enc.front(), Decode::Sample, sample_seed(seed, i));
    if (i == 0 || r.cost < best.cost) best = std::move(r);
  }
  return best;
}

double accumulate_grad(PolicyParams& p, const std::vector<const SubProblem*>& subs,
                       const std::vector<std::vector<int>>& actions,
                       const std::vector<double>& weights, NormMode mode, Gradient& grad) {
  return batch_objective(p, subs, actions, weights, mode, &grad);
}

double weighted_log_prob(PolicyParams& p, const std::vector<const SubProblem*>& subs,
                         const std::vector<std::vector<int>>& actions,
                         const std::vector<double>& weights, NormMode mode) {
  return batch_objective(p, subs, actions, weights, mode, nullptr);
}

} // namespace agh::policy
