// bmx/neural/train.hpp
//
// AdamW training loop with validation-accuracy early stopping, plus the
// evaluation helpers used by the experiment harness. Training is
// deterministic under its seed; optional in-batch gradient parallelism
// changes only floating-point association (bounded by 1e-10 per step).

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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <thread>
#include <vector>

#include "bmx/errors.hpp"
#include "bmx/neural/model.hpp"
#include "bmx/rng.hpp"
#include "bmx/tensor.hpp"

namespace bmx::neural {

struct TrainConfig {
  double lr = 1e-4;
  double weight_decay = 0.01;
  std::size_t max_epochs = 200;
  std::size_t patience = 20;  // epochs without val-accuracy improvement
  std::size_t batch_size = 16;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t threads = 1;  // in-batch gradient workers

  TrainConfig validated() const {
    require(lr >= 0.0, ErrorCategory::kInvalidConfig, "lr must be >= 0");
    require(max_epochs >= 1, ErrorCategory::kInvalidConfig,
            "max_epochs must be >= 1");
    require(patience < max_epochs, ErrorCategory::kInvalidConfig,
            "patience must be smaller than max_epochs");
    require(batch_size >= 1, ErrorCategory::kInvalidConfig,
            "batch_size must be >= 1");
    require(threads >= 1, ErrorCategory::kInvalidConfig,
            "threads must be >= 1");
    return *this;
  }
};

struct TrainHistory {
  std::vector<double> train_loss;  // per epoch
  std::vector<double> val_acc;     // per epoch (NaN when no val set)
  std::size_t best_epoch = 0;
  double best_val_acc = 0.0;
};

using SampleView = std::vector<const RdmSequence*>;

namespace detail {

inline std::vector<Matrix*> collect(ModelParams& p) {
  std::vector<Matrix*> out;
  visit_params(p, [&](const std::string&, Matrix& m) { out.push_back(&m); });
  return out;
}

}  // namespace detail

/// Decoupled-weight-decay adaptive-moment optimizer. The decay term is
/// scaled by the learning rate, so lr == 0 leaves parameters untouched.
class AdamW {
 public:
  AdamW(const ModelParams& params, const TrainConfig& cfg)
      : cfg_(cfg.validated()), m_(zeros_like(params)), v_(zeros_like(params)) {}

  void step(ModelParams& params, ModelParams& grads) {
    ++t_;
    auto ps = detail::collect(params);
    auto gs = detail::collect(grads);
    auto ms = detail::collect(m_);
    auto vs = detail::collect(v_);
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < ps.size(); ++i) {
      Matrix& p = *ps[i];
      const Matrix& g = *gs[i];
      Matrix& m = *ms[i];
      Matrix& v = *vs[i];
      m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
      v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
      const Matrix mhat = m / bc1;
      const Matrix vhat = v / bc2;
      p -= cfg_.lr * (mhat.cwiseQuotient(
                          (vhat.cwiseSqrt().array() + cfg_.eps).matrix()) +
                      cfg_.weight_decay * p);
    }
  }

 private:
  TrainConfig cfg_;
  ModelParams m_, v_;
  std::size_t t_ = 0;
};

/// Mean cross-entropy gradient over a batch. Per-sample dropout streams are
/// seeded by the global sample index, so results do not depend on the worker
/// count; worker partials are reduced in a fixed chunk order.
inline double batch_gradients(const ModelParams& params,
                              const SampleView& samples,
                              const std::vector<std::size_t>& batch,
                              std::uint64_t batch_seed, std::size_t threads,
                              ModelParams& grads) {
  const std::size_t n = batch.size();
  require(n >= 1, ErrorCategory::kInvalidArgument, "empty batch");
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, n));

  std::vector<ModelParams> partial(workers, zeros_like(params));
  std::vector<double> partial_loss(workers, 0.0);

  auto run_chunk = [&](std::size_t w, std::size_t lo, std::size_t hi) {
    ForwardCache cache;
    for (std::size_t i = lo; i < hi; ++i) {
      const RdmSequence& s = *samples[batch[i]];
      Rng rng(mix_seed(batch_seed, batch[i]));
      const Vector probs =
          forward(params, s.tensor, /*train_mode=*/true, &rng, &cache);
      partial_loss[w] += cross_entropy(probs, s.label);
      backward(params, s.tensor, cache, s.label, partial[w]);
    }
  };

  if (workers == 1) {
    run_chunk(0, 0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t per = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t lo = w * per;
      const std::size_t hi = std::min(n, lo + per);
      if (lo >= hi) break;
      pool.emplace_back(run_chunk, w, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  // fixed-order reduction, then the batch mean
  auto gs = detail::collect(grads);
  double loss = 0.0;
  for (std::size_t w = 0; w < workers; ++w) {
    auto pw = detail::collect(partial[w]);
    for (std::size_t i = 0; i < gs.size(); ++i) *gs[i] += *pw[i];
    loss += partial_loss[w];
  }
  const double inv = 1.0 / static_cast<double>(n);
  for (auto* g : gs) *g *= inv;
  return loss * inv;
}

inline int predict(const ModelParams& params, const Tensor4<double>& x) {
  const Vector probs = forward(params, x);
  Eigen::Index best = 0;
  probs.maxCoeff(&best);
  return static_cast<int>(best);
}

inline double accuracy(const ModelParams& params, const SampleView& samples) {
  if (samples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const RdmSequence* s : samples) {
    if (predict(params, s->tensor) == s->label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

/// Trains from scratch and returns the best-validation checkpoint (the final
/// parameters when no validation set is supplied).
inline ModelParams train(const SampleView& train_samples,
                         const SampleView& val_samples,
                         const ModelConfig& model_cfg, const TrainConfig& cfg_in,
                         std::uint64_t seed, TrainHistory* history = nullptr) {
  const TrainConfig cfg = cfg_in.validated();
  require(!train_samples.empty(), ErrorCategory::kInvalidArgument,
          "train: empty training set");
  for (const RdmSequence* s : train_samples) {
    require(s->label >= 0 && s->label < static_cast<int>(model_cfg.classes),
            ErrorCategory::kInvalidArgument, "train: sample label out of range");
  }

  ModelParams params = init_params(model_cfg, mix_seed(seed, 0x1717));
  ModelParams best = params;
  AdamW opt(params, cfg);
  TrainHistory local;
  TrainHistory& hist = history ? *history : local;
  hist = {};

  double best_acc = -1.0;
  std::size_t since_best = 0;
  std::vector<std::size_t> order(train_samples.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    Rng shuffle_rng(mix_seed(seed, 0xe90c, epoch));
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size();
         start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const std::vector<std::size_t> batch(order.begin() + start,
                                           order.begin() + end);
      ModelParams grads = zeros_like(params);
      epoch_loss += batch_gradients(params, train_samples, batch,
                                    mix_seed(seed, epoch, start), cfg.threads,
                                    grads);
      opt.step(params, grads);
      ++batches;
    }
    hist.train_loss.push_back(epoch_loss / static_cast<double>(batches));

    if (!val_samples.empty()) {
      const double acc = accuracy(params, val_samples);
      hist.val_acc.push_back(acc);
      if (acc > best_acc) {
        best_acc = acc;
        best = params;
        hist.best_epoch = epoch;
        hist.best_val_acc = acc;
        since_best = 0;
      } else if (++since_best > cfg.patience) {
        break;
      }
    } else {
      hist.val_acc.push_back(std::numeric_limits<double>::quiet_NaN());
      best = params;
      hist.best_epoch = epoch;
    }
  }
  return best;
}

struct FoldStats {
  std::vector<double> per_fold;
  double mean = 0.0;
  double stddev = 0.0;
};

inline FoldStats fold_stats(const std::vector<double>& accs) {
  FoldStats s;
  s.per_fold = accs;
  if (accs.empty()) return s;
  s.mean = std::accumulate(accs.begin(), accs.end(), 0.0) /
           static_cast<double>(accs.size());
  double var = 0.0;
  for (double a : accs) var += (a - s.mean) * (a - s.mean);
  s.stddev = std::sqrt(var / static_cast<double>(accs.size()));
  return s;
}

/// Per-fold accuracy of a fixed parameter set: samples are partitioned
/// round-robin into k folds and scored independently.
inline FoldStats evaluate(const SampleView& samples, const ModelParams& params,
                          std::size_t k_folds) {
  require(k_folds >= 2, ErrorCategory::kInvalidArgument,
          "evaluate: need k >= 2");
  require(samples.size() >= k_folds, ErrorCategory::kInvalidArgument,
          "evaluate: fewer samples than folds");
  std::vector<double> accs;
  for (std::size_t f = 0; f < k_folds; ++f) {
    SampleView fold;
    for (std::size_t i = f; i < samples.size(); i += k_folds) {
      fold.push_back(samples[i]);
    }
    accs.push_back(accuracy(params, fold));
  }
  return fold_stats(accs);
}

}  // namespace bmx::neural
