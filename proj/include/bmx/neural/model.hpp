// bmx/neural/model.hpp
//
// Beam-fusing gesture classifier, from scratch: per-time-step multi-head
// self-attention over beam tokens, a small 2-D conv stack over the
// re-assembled range-doppler maps, an FC embedding with dropout, an LSTM
// over the latent sequence and a softmax head. Forward and backward are
// hand-written and verified against central finite differences.

// Copyright 2026 The BMX Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "bmx/errors.hpp"
#include "bmx/rng.hpp"
#include "bmx/tensor.hpp"

namespace bmx::neural {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct ModelConfig {
  std::size_t range_bins = 0;
  std::size_t doppler_bins = 0;
  std::size_t beams = 0;
  std::size_t time_steps = 0;
  std::size_t classes = 6;

  std::size_t attention_layers = 3;
  std::size_t heads = 8;
  std::size_t conv_layers = 3;
  std::size_t conv_base_filters = 8;  // doubles per layer: 8, 16, 32, ...
  std::size_t kernel = 3;
  std::size_t latent_dim = 128;
  double dropout = 0.5;
  std::size_t lstm_hidden = 128;
  std::size_t lstm_layers = 1;

  std::size_t d_model() const { return range_bins * doppler_bins; }
  std::size_t conv_filters(std::size_t layer) const {
    return conv_base_filters << layer;
  }

  ModelConfig validated() const {
    require(range_bins > 0 && doppler_bins > 0 && beams > 0 && time_steps > 0,
            ErrorCategory::kInvalidConfig, "model input dims must be set");
    require(classes >= 2, ErrorCategory::kInvalidConfig,
            "need at least 2 classes");
    require(heads >= 1, ErrorCategory::kInvalidConfig, "need >= 1 head");
    require(attention_layers == 0 || d_model() % heads == 0,
            ErrorCategory::kInvalidConfig,
            "d_model (range*doppler) must be divisible by the head count");
    require(conv_layers >= 1 && conv_layers <= 5,
            ErrorCategory::kInvalidConfig, "conv layers must be 1..5");
    require(kernel % 2 == 1, ErrorCategory::kInvalidConfig,
            "kernel size must be odd (same padding)");
    require(dropout >= 0.0 && dropout < 1.0, ErrorCategory::kInvalidConfig,
            "dropout must be in [0, 1)");
    require(lstm_layers >= 1 && lstm_layers <= 4, ErrorCategory::kInvalidConfig,
            "lstm layers must be 1..4");
    require(latent_dim >= 1 && lstm_hidden >= 1, ErrorCategory::kInvalidConfig,
            "latent/lstm dims must be >= 1");
    return *this;
  }
};

// Parameter blocks. Biases are column matrices so one visitor covers
// everything (optimizer, serializer, gradient checker).
struct AttentionLayerParams {
  Matrix wq, wk, wv;  // d_model x d_model, heads packed along columns
  Matrix wo;          // d_model x d_model
};

struct ConvLayerParams {
  Matrix w;  // out_ch x (in_ch * k * k)
  Matrix b;  // out_ch x 1
  std::size_t in_ch = 0, out_ch = 0, k = 3;
};

struct DenseParams {
  Matrix w;  // out x in
  Matrix b;  // out x 1
};

struct LstmLayerParams {
  Matrix wx;  // 4H x in   (gate order: i, f, g, o)
  Matrix wh;  // 4H x H
  Matrix b;   // 4H x 1
};

struct ModelParams {
  ModelConfig cfg;
  std::vector<AttentionLayerParams> attention;
  std::vector<ConvLayerParams> conv;
  DenseParams embed;
  std::vector<LstmLayerParams> lstm;
  DenseParams head;
};

/// Visits every parameter matrix with a stable name; the iteration order
/// defines the checkpoint block order.
template <typename Fn>
void visit_params(ModelParams& p, Fn&& fn) {
  for (std::size_t l = 0; l < p.attention.size(); ++l) {
    const std::string base = "attention" + std::to_string(l) + ".";
    fn(base + "wq", p.attention[l].wq);
    fn(base + "wk", p.attention[l].wk);
    fn(base + "wv", p.attention[l].wv);
    fn(base + "wo", p.attention[l].wo);
  }
  for (std::size_t l = 0; l < p.conv.size(); ++l) {
    const std::string base = "conv" + std::to_string(l) + ".";
    fn(base + "w", p.conv[l].w);
    fn(base + "b", p.conv[l].b);
  }
  fn("embed.w", p.embed.w);
  fn("embed.b", p.embed.b);
  for (std::size_t l = 0; l < p.lstm.size(); ++l) {
    const std::string base = "lstm" + std::to_string(l) + ".";
    fn(base + "wx", p.lstm[l].wx);
    fn(base + "wh", p.lstm[l].wh);
    fn(base + "b", p.lstm[l].b);
  }
  fn("head.w", p.head.w);
  fn("head.b", p.head.b);
}

template <typename Fn>
void visit_params(const ModelParams& p, Fn&& fn) {
  visit_params(const_cast<ModelParams&>(p),
               [&](const std::string& n, Matrix& m) {
                 fn(n, static_cast<const Matrix&>(m));
               });
}

inline std::size_t param_count(const ModelParams& p) {
  std::size_t n = 0;
  visit_params(p, [&](const std::string&, const Matrix& m) {
    n += static_cast<std::size_t>(m.size());
  });
  return n;
}

/// Same-shaped parameter set filled with zeros (gradient accumulators,
/// optimizer moments).
inline ModelParams zeros_like(const ModelParams& p) {
  ModelParams z = p;
  visit_params(z, [](const std::string&, Matrix& m) { m.setZero(); });
  return z;
}

namespace detail {
inline void init_uniform(Matrix& m, std::size_t fan_in, Rng& rng) {
  const double s = std::sqrt(1.0 / static_cast<double>(fan_in == 0 ? 1 : fan_in));
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = rng.uniform(-s, s);
  }
}
}  // namespace detail

/// Fan-in-scaled uniform initialization. LSTM forget-gate biases start at 1.
inline ModelParams init_params(const ModelConfig& config, std::uint64_t seed) {
  const ModelConfig cfg = config.validated();
  Rng rng(mix_seed(seed, 0x9e1));
  ModelParams p;
  p.cfg = cfg;
  const std::size_t d = cfg.d_model();

  p.attention.resize(cfg.attention_layers);
  for (auto& a : p.attention) {
    a.wq = Matrix(d, d);
    a.wk = Matrix(d, d);
    a.wv = Matrix(d, d);
    a.wo = Matrix(d, d);
    detail::init_uniform(a.wq, d, rng);
    detail::init_uniform(a.wk, d, rng);
    detail::init_uniform(a.wv, d, rng);
    detail::init_uniform(a.wo, d, rng);
  }

  p.conv.resize(cfg.conv_layers);
  std::size_t in_ch = cfg.beams;
  for (std::size_t l = 0; l < cfg.conv_layers; ++l) {
    ConvLayerParams& c = p.conv[l];
    c.in_ch = in_ch;
    c.out_ch = cfg.conv_filters(l);
    c.k = cfg.kernel;
    c.w = Matrix(c.out_ch, c.in_ch * c.k * c.k);
    c.b = Matrix::Zero(c.out_ch, 1);
    detail::init_uniform(c.w, c.in_ch * c.k * c.k, rng);
    in_ch = c.out_ch;
  }

  const std::size_t flat = in_ch * cfg.range_bins * cfg.doppler_bins;
  p.embed.w = Matrix(cfg.latent_dim, flat);
  p.embed.b = Matrix::Zero(cfg.latent_dim, 1);
  detail::init_uniform(p.embed.w, flat, rng);

  p.lstm.resize(cfg.lstm_layers);
  std::size_t lstm_in = cfg.latent_dim;
  for (auto& l : p.lstm) {
    l.wx = Matrix(4 * cfg.lstm_hidden, lstm_in);
    l.wh = Matrix(4 * cfg.lstm_hidden, cfg.lstm_hidden);
    l.b = Matrix::Zero(4 * cfg.lstm_hidden, 1);
    detail::init_uniform(l.wx, lstm_in, rng);
    detail::init_uniform(l.wh, cfg.lstm_hidden, rng);
    // forget gate bias 1: stable cell state early in training
    l.b.block(static_cast<Eigen::Index>(cfg.lstm_hidden), 0,
              static_cast<Eigen::Index>(cfg.lstm_hidden), 1)
        .setOnes();
    lstm_in = cfg.lstm_hidden;
  }

  p.head.w = Matrix(cfg.classes, cfg.lstm_hidden);
  p.head.b = Matrix::Zero(cfg.classes, 1);
  detail::init_uniform(p.head.w, cfg.lstm_hidden, rng);
  return p;
}

// ---------------------------------------------------------------------------
// Primitive attention operations (exposed for oracle tests)

/// Row-wise softmax, numerically stabilized.
inline Matrix softmax_rows(const Matrix& s) {
  Matrix out(s.rows(), s.cols());
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    const double mx = s.row(r).maxCoeff();
    Eigen::ArrayXd e = (s.row(r).array() - mx).exp();
    out.row(r) = (e / e.sum()).matrix();
  }
  return out;
}

/// softmax(Q K^T / sqrt(d_k)) V.
inline Matrix attention(const Matrix& q, const Matrix& k, const Matrix& v) {
  require(q.cols() == k.cols() && k.rows() == v.rows(),
          ErrorCategory::kInvalidArgument, "attention: shape mismatch");
  require(q.cols() > 0, ErrorCategory::kInvalidArgument,
          "attention: d_k must be positive");
  const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  return softmax_rows(q * k.transpose() * scale) * v;
}

/// Concat(head_1, ..., head_h) W^O with head_i = attention(Q Wq_i, K Wk_i,
/// V Wv_i); the per-head projections are the packed column blocks.
inline Matrix multi_head(const Matrix& q, const Matrix& k, const Matrix& v,
                         const AttentionLayerParams& p, std::size_t heads) {
  const Eigen::Index d = p.wq.rows();
  require(q.cols() == d && k.cols() == d && v.cols() == d,
          ErrorCategory::kInvalidArgument, "multi_head: shape mismatch");
  require(heads >= 1 && d % static_cast<Eigen::Index>(heads) == 0,
          ErrorCategory::kInvalidArgument,
          "multi_head: heads must divide d_model");
  const Eigen::Index dk = d / static_cast<Eigen::Index>(heads);
  const Matrix qp = q * p.wq, kp = k * p.wk, vp = v * p.wv;
  Matrix concat(q.rows(), d);
  for (std::size_t h = 0; h < heads; ++h) {
    const Eigen::Index off = static_cast<Eigen::Index>(h) * dk;
    concat.middleCols(off, dk) = attention(qp.middleCols(off, dk),
                                           kp.middleCols(off, dk),
                                           vp.middleCols(off, dk));
  }
  return concat * p.wo;
}

// ---------------------------------------------------------------------------
// Forward/backward caches

namespace detail {

struct AttentionCache {
  Matrix x;                 // layer input (beams x d_model)
  Matrix q, k, v;           // projected
  std::vector<Matrix> p;    // per-head softmax matrices (beams x beams)
  Matrix concat;            // concatenated head outputs
};

struct StepCache {
  std::vector<AttentionCache> attention;  // one per layer
  Matrix tokens_out;                      // after the attention stack
  std::vector<std::vector<double>> conv_in;   // per layer: input planes
  std::vector<std::vector<double>> conv_pre;  // per layer: pre-activation
  std::vector<double> flat;                   // conv output, flattened
  Vector embed_pre;                           // before relu
  Vector latent;                              // after relu
  Vector dropout_mask;                        // scale factors (1/(1-p) or 0)
  Vector latent_dropped;
};

struct LstmStepCache {
  Vector x, h_prev, c_prev;
  Vector i, f, g, o, c, tanh_c, h;
};

}  // namespace detail

struct ForwardCache {
  std::vector<detail::StepCache> steps;
  // lstm_steps[layer][t]
  std::vector<std::vector<detail::LstmStepCache>> lstm_steps;
  Vector final_hidden;
  Vector probs;
};

namespace detail {

inline void conv2d_forward(const std::vector<double>& in, std::size_t in_ch,
                           std::size_t rows, std::size_t cols,
                           const ConvLayerParams& p, std::vector<double>& pre) {
  const long k = static_cast<long>(p.k);
  const long half = k / 2;
  pre.assign(p.out_ch * rows * cols, 0.0);
  for (std::size_t oc = 0; oc < p.out_ch; ++oc) {
    const double bias = p.b(static_cast<Eigen::Index>(oc), 0);
    double* out_plane = pre.data() + oc * rows * cols;
    for (long r = 0; r < static_cast<long>(rows); ++r) {
      for (long d = 0; d < static_cast<long>(cols); ++d) {
        double acc = bias;
        for (std::size_t ic = 0; ic < in_ch; ++ic) {
          const double* in_plane = in.data() + ic * rows * cols;
          for (long kr = -half; kr <= half; ++kr) {
            const long rr = r + kr;
            if (rr < 0 || rr >= static_cast<long>(rows)) continue;
            for (long kd = -half; kd <= half; ++kd) {
              const long dd = d + kd;
              if (dd < 0 || dd >= static_cast<long>(cols)) continue;
              const auto widx = static_cast<Eigen::Index>(
                  (ic * p.k + static_cast<std::size_t>(kr + half)) * p.k +
                  static_cast<std::size_t>(kd + half));
              acc += p.w(static_cast<Eigen::Index>(oc), widx) *
                     in_plane[rr * static_cast<long>(cols) + dd];
            }
          }
        }
        out_plane[r * static_cast<long>(cols) + d] = acc;
      }
    }
  }
}

inline void conv2d_backward(const std::vector<double>& in,
                            const std::vector<double>& pre, std::size_t in_ch,
                            std::size_t rows, std::size_t cols,
                            const ConvLayerParams& p,
                            const std::vector<double>& dout_postrelu,
                            std::vector<double>& din, ConvLayerParams& grad) {
  const long k = static_cast<long>(p.k);
  const long half = k / 2;
  din.assign(in_ch * rows * cols, 0.0);
  for (std::size_t oc = 0; oc < p.out_ch; ++oc) {
    const double* pre_plane = pre.data() + oc * rows * cols;
    const double* dout_plane = dout_postrelu.data() + oc * rows * cols;
    for (long r = 0; r < static_cast<long>(rows); ++r) {
      for (long d = 0; d < static_cast<long>(cols); ++d) {
        const long idx = r * static_cast<long>(cols) + d;
        if (pre_plane[idx] <= 0.0) continue;  // relu gate
        const double g = dout_plane[idx];
        if (g == 0.0) continue;
        grad.b(static_cast<Eigen::Index>(oc), 0) += g;
        for (std::size_t ic = 0; ic < in_ch; ++ic) {
          const double* in_plane = in.data() + ic * rows * cols;
          double* din_plane = din.data() + ic * rows * cols;
          for (long kr = -half; kr <= half; ++kr) {
            const long rr = r + kr;
            if (rr < 0 || rr >= static_cast<long>(rows)) continue;
            for (long kd = -half; kd <= half; ++kd) {
              const long dd = d + kd;
              if (dd < 0 || dd >= static_cast<long>(cols)) continue;
              const auto widx = static_cast<Eigen::Index>(
                  (ic * p.k + static_cast<std::size_t>(kr + half)) * p.k +
                  static_cast<std::size_t>(kd + half));
              const long in_idx = rr * static_cast<long>(cols) + dd;
              grad.w(static_cast<Eigen::Index>(oc), widx) +=
                  g * in_plane[in_idx];
              din_plane[in_idx] += g * p.w(static_cast<Eigen::Index>(oc), widx);
            }
          }
        }
      }
    }
  }
}

}  // namespace detail

/// Forward pass over one sample. train_mode enables dropout (rng required);
/// with train_mode false the pass is deterministic. Probabilities sum to 1.
inline Vector forward(const ModelParams& params, const Tensor4<double>& x,
                      bool train_mode = false, Rng* rng = nullptr,
                      ForwardCache* cache = nullptr) {
  const ModelConfig& cfg = params.cfg;
  require(x.range_bins() == cfg.range_bins &&
              x.doppler_bins() == cfg.doppler_bins && x.beams() == cfg.beams,
          ErrorCategory::kInvalidArgument,
          "forward: input dims do not match the model config");
  require(x.time_steps() >= 1, ErrorCategory::kInvalidArgument,
          "forward: need at least one time step");
  require(!train_mode || cfg.dropout == 0.0 || rng != nullptr,
          ErrorCategory::kInvalidArgument,
          "forward: dropout in train mode needs an RNG");

  const std::size_t T = x.time_steps();
  const std::size_t B = cfg.beams;
  const std::size_t d = cfg.d_model();
  const std::size_t R = cfg.range_bins;
  const std::size_t D = cfg.doppler_bins;
  ForwardCache local;
  ForwardCache& fc = cache ? *cache : local;
  fc.steps.assign(T, {});
  fc.lstm_steps.assign(cfg.lstm_layers, {});
  for (auto& v : fc.lstm_steps) v.assign(T, {});

  const Eigen::Index heads = static_cast<Eigen::Index>(cfg.heads);
  const Eigen::Index dk =
      cfg.attention_layers > 0
          ? static_cast<Eigen::Index>(d) / heads
          : 0;

  // per-layer LSTM state
  std::vector<Vector> h(cfg.lstm_layers), c(cfg.lstm_layers);
  for (std::size_t l = 0; l < cfg.lstm_layers; ++l) {
    h[l] = Vector::Zero(static_cast<Eigen::Index>(cfg.lstm_hidden));
    c[l] = Vector::Zero(static_cast<Eigen::Index>(cfg.lstm_hidden));
  }

  for (std::size_t t = 0; t < T; ++t) {
    detail::StepCache& sc = fc.steps[t];

    // beam tokens: one flattened RDM per row
    Matrix tokens(B, d);
    for (std::size_t b = 0; b < B; ++b) {
      const double* slab = x.slab(b, t);
      for (std::size_t i = 0; i < d; ++i) {
        tokens(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(i)) =
            slab[i];
      }
    }

    // encoder stack: multi-head self-attention layers
    sc.attention.resize(cfg.attention_layers);
    for (std::size_t l = 0; l < cfg.attention_layers; ++l) {
      detail::AttentionCache& ac = sc.attention[l];
      const AttentionLayerParams& ap = params.attention[l];
      ac.x = tokens;
      ac.q = tokens * ap.wq;
      ac.k = tokens * ap.wk;
      ac.v = tokens * ap.wv;
      ac.p.resize(cfg.heads);
      ac.concat.resize(static_cast<Eigen::Index>(B), static_cast<Eigen::Index>(d));
      const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
      for (Eigen::Index hh = 0; hh < heads; ++hh) {
        const Eigen::Index off = hh * dk;
        const Matrix s =
            ac.q.middleCols(off, dk) * ac.k.middleCols(off, dk).transpose() *
            scale;
        ac.p[static_cast<std::size_t>(hh)] = softmax_rows(s);
        ac.concat.middleCols(off, dk) =
            ac.p[static_cast<std::size_t>(hh)] * ac.v.middleCols(off, dk);
      }
      tokens = ac.concat * ap.wo;
    }
    sc.tokens_out = tokens;

    // beams become conv input channels, tokens reshaped back to R x D
    std::vector<double> planes(B * R * D);
    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t i = 0; i < d; ++i) {
        planes[b * R * D + i] =
            tokens(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(i));
      }
    }

    sc.conv_in.resize(cfg.conv_layers);
    sc.conv_pre.resize(cfg.conv_layers);
    std::size_t ch = B;
    for (std::size_t l = 0; l < cfg.conv_layers; ++l) {
      sc.conv_in[l] = planes;
      detail::conv2d_forward(planes, ch, R, D, params.conv[l],
                             sc.conv_pre[l]);
      // relu
      planes.resize(sc.conv_pre[l].size());
      for (std::size_t i = 0; i < planes.size(); ++i) {
        planes[i] = sc.conv_pre[l][i] > 0.0 ? sc.conv_pre[l][i] : 0.0;
      }
      ch = params.conv[l].out_ch;
    }
    sc.flat = planes;

    // FC embedding + relu
    Eigen::Map<const Vector> flat_vec(planes.data(),
                                      static_cast<Eigen::Index>(planes.size()));
    sc.embed_pre = params.embed.w * flat_vec + params.embed.b.col(0);
    sc.latent = sc.embed_pre.cwiseMax(0.0);

    // dropout (inverted): identity in eval mode
    sc.dropout_mask = Vector::Ones(sc.latent.size());
    if (train_mode && cfg.dropout > 0.0) {
      const double keep = 1.0 - cfg.dropout;
      for (Eigen::Index i = 0; i < sc.dropout_mask.size(); ++i) {
        sc.dropout_mask(i) = rng->uniform01() < keep ? 1.0 / keep : 0.0;
      }
    }
    sc.latent_dropped = sc.latent.cwiseProduct(sc.dropout_mask);

    // LSTM stack, one step
    Vector input = sc.latent_dropped;
    for (std::size_t l = 0; l < cfg.lstm_layers; ++l) {
      detail::LstmStepCache& lc = fc.lstm_steps[l][t];
      const LstmLayerParams& lp = params.lstm[l];
      const auto H = static_cast<Eigen::Index>(cfg.lstm_hidden);
      lc.x = input;
      lc.h_prev = h[l];
      lc.c_prev = c[l];
      Vector z = lp.wx * input + lp.wh * h[l] + lp.b.col(0);
      lc.i = z.segment(0, H).unaryExpr(
          [](double v) { return 1.0 / (1.0 + std::exp(-v)); });
      lc.f = z.segment(H, H).unaryExpr(
          [](double v) { return 1.0 / (1.0 + std::exp(-v)); });
      lc.g = z.segment(2 * H, H).array().tanh().matrix();
      lc.o = z.segment(3 * H, H).unaryExpr(
          [](double v) { return 1.0 / (1.0 + std::exp(-v)); });
      lc.c = lc.f.cwiseProduct(lc.c_prev) + lc.i.cwiseProduct(lc.g);
      lc.tanh_c = lc.c.array().tanh().matrix();
      lc.h = lc.o.cwiseProduct(lc.tanh_c);
      h[l] = lc.h;
      c[l] = lc.c;
      input = lc.h;
    }
  }

  fc.final_hidden = h[cfg.lstm_layers - 1];
  Vector logits = params.head.w * fc.final_hidden + params.head.b.col(0);
  const double mx = logits.maxCoeff();
  Eigen::ArrayXd e = (logits.array() - mx).exp();
  fc.probs = (e / e.sum()).matrix();
  return fc.probs;
}

inline double cross_entropy(const Vector& probs, int label) {
  require(label >= 0 && label < probs.size(), ErrorCategory::kInvalidArgument,
          "cross_entropy: label out of range");
  return -std::log(std::max(probs(label), 1e-300));
}

/// Backward pass for one sample; adds this sample's gradients into `grads`.
/// Must be called with the cache produced by the matching forward call.
inline void backward(const ModelParams& params, const Tensor4<double>& x,
                     const ForwardCache& fc, int label, ModelParams& grads) {
  const ModelConfig& cfg = params.cfg;
  const std::size_t T = x.time_steps();
  const std::size_t B = cfg.beams;
  const std::size_t d = cfg.d_model();
  const std::size_t R = cfg.range_bins;
  const std::size_t D = cfg.doppler_bins;
  const auto H = static_cast<Eigen::Index>(cfg.lstm_hidden);

  // softmax + cross entropy
  Vector dlogits = fc.probs;
  dlogits(label) -= 1.0;
  grads.head.w += dlogits * fc.final_hidden.transpose();
  grads.head.b.col(0) += dlogits;

  // LSTM backward through time; only the final step receives head gradient
  std::vector<Vector> dh(cfg.lstm_layers, Vector::Zero(H));
  std::vector<Vector> dc(cfg.lstm_layers, Vector::Zero(H));
  dh[cfg.lstm_layers - 1] = params.head.w.transpose() * dlogits;

  std::vector<Vector> dlatent(T);
  for (std::size_t ti = T; ti-- > 0;) {
    // top-down through the stacked layers at this time step
    Vector dx_lower = Vector::Zero(0);
    for (std::size_t l = cfg.lstm_layers; l-- > 0;) {
      const detail::LstmStepCache& lc = fc.lstm_steps[l][ti];
      const LstmLayerParams& lp = params.lstm[l];
      Vector dh_total = dh[l];
      if (dx_lower.size() > 0) dh_total += dx_lower;

      const Vector do_ = dh_total.cwiseProduct(lc.tanh_c);
      Vector dc_total =
          dc[l] + dh_total.cwiseProduct(lc.o).cwiseProduct(
                      (1.0 - lc.tanh_c.array().square()).matrix());
      const Vector di = dc_total.cwiseProduct(lc.g);
      const Vector df = dc_total.cwiseProduct(lc.c_prev);
      const Vector dg = dc_total.cwiseProduct(lc.i);
      dc[l] = dc_total.cwiseProduct(lc.f);

      Vector dz(4 * H);
      dz.segment(0, H) =
          di.cwiseProduct(lc.i).cwiseProduct((1.0 - lc.i.array()).matrix());
      dz.segment(H, H) =
          df.cwiseProduct(lc.f).cwiseProduct((1.0 - lc.f.array()).matrix());
      dz.segment(2 * H, H) =
          dg.cwiseProduct((1.0 - lc.g.array().square()).matrix());
      dz.segment(3 * H, H) =
          do_.cwiseProduct(lc.o).cwiseProduct((1.0 - lc.o.array()).matrix());

      grads.lstm[l].wx += dz * lc.x.transpose();
      grads.lstm[l].wh += dz * lc.h_prev.transpose();
      grads.lstm[l].b.col(0) += dz;
      dh[l] = lp.wh.transpose() * dz;  // flows to step t-1
      dx_lower = lp.wx.transpose() * dz;
    }
    dlatent[ti] = dx_lower;
  }

  // per-step backward through dropout, embedding, conv stack, attention
  for (std::size_t t = 0; t < T; ++t) {
    const detail::StepCache& sc = fc.steps[t];
    const Vector dlat = dlatent[t].cwiseProduct(sc.dropout_mask);
    const Vector dembed_pre = dlat.cwiseProduct(
        (sc.embed_pre.array() > 0.0).cast<double>().matrix());
    Eigen::Map<const Vector> flat_vec(sc.flat.data(),
                                      static_cast<Eigen::Index>(sc.flat.size()));
    grads.embed.w += dembed_pre * flat_vec.transpose();
    grads.embed.b.col(0) += dembed_pre;
    Vector dflat = params.embed.w.transpose() * dembed_pre;

    // conv stack backward
    std::vector<double> dplanes(static_cast<std::size_t>(dflat.size()));
    for (std::size_t i = 0; i < dplanes.size(); ++i) {
      dplanes[i] = dflat(static_cast<Eigen::Index>(i));
    }
    for (std::size_t l = cfg.conv_layers; l-- > 0;) {
      std::vector<double> din;
      detail::conv2d_backward(sc.conv_in[l], sc.conv_pre[l],
                              params.conv[l].in_ch, R, D, params.conv[l],
                              dplanes, din, grads.conv[l]);
      dplanes = std::move(din);
    }

    // back to beam tokens
    Matrix dtokens(B, d);
    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t i = 0; i < d; ++i) {
        dtokens(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(i)) =
            dplanes[b * R * D + i];
      }
    }

    // attention stack backward
    const Eigen::Index heads = static_cast<Eigen::Index>(cfg.heads);
    const Eigen::Index dk =
        cfg.attention_layers > 0 ? static_cast<Eigen::Index>(d) / heads : 0;
    for (std::size_t l = cfg.attention_layers; l-- > 0;) {
      const detail::AttentionCache& ac = sc.attention[l];
      const AttentionLayerParams& ap = params.attention[l];
      AttentionLayerParams& ag = grads.attention[l];

      // y = concat * wo
      ag.wo += ac.concat.transpose() * dtokens;
      const Matrix dconcat = dtokens * ap.wo.transpose();

      Matrix dq = Matrix::Zero(ac.q.rows(), ac.q.cols());
      Matrix dkm = Matrix::Zero(ac.k.rows(), ac.k.cols());
      Matrix dv = Matrix::Zero(ac.v.rows(), ac.v.cols());
      const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
      for (Eigen::Index hh = 0; hh < heads; ++hh) {
        const Eigen::Index off = hh * dk;
        const Matrix& pm = ac.p[static_cast<std::size_t>(hh)];
        const Matrix dhead = dconcat.middleCols(off, dk);
        const Matrix dp = dhead * ac.v.middleCols(off, dk).transpose();
        dv.middleCols(off, dk) += pm.transpose() * dhead;
        // softmax jacobian per row
        Matrix ds(pm.rows(), pm.cols());
        for (Eigen::Index r = 0; r < pm.rows(); ++r) {
          const double dot = dp.row(r).dot(pm.row(r));
          ds.row(r) =
              pm.row(r).cwiseProduct(dp.row(r).array().matrix() -
                                     Eigen::RowVectorXd::Constant(
                                         pm.cols(), dot));
        }
        dq.middleCols(off, dk) += ds * ac.k.middleCols(off, dk) * scale;
        dkm.middleCols(off, dk) +=
            ds.transpose() * ac.q.middleCols(off, dk) * scale;
      }
      ag.wq += ac.x.transpose() * dq;
      ag.wk += ac.x.transpose() * dkm;
      ag.wv += ac.x.transpose() * dv;
      dtokens = dq * ap.wq.transpose() + dkm * ap.wk.transpose() +
                dv * ap.wv.transpose();
    }
    // input gradients are discarded
  }
}

}  // namespace bmx::neural
