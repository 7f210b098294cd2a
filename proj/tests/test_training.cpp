// tests/test_training.cpp

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

#include <catch_amalgamated.hpp>

#include <cmath>

#include "bmx/neural/train.hpp"
#include "bmx/rng.hpp"

using bmx::RdmSequence;
using bmx::neural::ModelConfig;
using bmx::neural::ModelParams;
using bmx::neural::SampleView;
using bmx::neural::TrainConfig;

namespace {

// Two linearly separable classes: an energy blob parked at a
// class-dependent cell plus mild noise.
std::vector<RdmSequence> toy_dataset(std::size_t per_class,
                                     std::uint64_t seed) {
  std::vector<RdmSequence> out;
  bmx::Rng rng(seed);
  for (std::size_t i = 0; i < per_class * 2; ++i) {
    const int label = static_cast<int>(i % 2);
    RdmSequence s;
    s.tensor = bmx::Tensor4<double>(4, 4, 1, 3);
    s.axes.range_bin_m = 0.04;
    s.axes.doppler_bin_mps = 0.028;
    s.beam_angles_deg = {0.0};
    s.label = label;
    for (auto& v : s.tensor.data()) v = rng.uniform(0.0, 0.08);
    for (std::size_t t = 0; t < 3; ++t) {
      if (label == 0) {
        s.tensor.at(1, 1, 0, t) += 0.8;
      } else {
        s.tensor.at(3, 2, 0, t) += 0.8;
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

SampleView view_of(const std::vector<RdmSequence>& v) {
  SampleView sv;
  for (const auto& s : v) sv.push_back(&s);
  return sv;
}

ModelConfig toy_config() {
  ModelConfig cfg;
  cfg.range_bins = 4;
  cfg.doppler_bins = 4;
  cfg.beams = 1;
  cfg.time_steps = 3;
  cfg.classes = 2;
  cfg.attention_layers = 1;
  cfg.heads = 2;
  cfg.conv_layers = 1;
  cfg.conv_base_filters = 4;
  cfg.latent_dim = 8;
  cfg.dropout = 0.2;
  cfg.lstm_hidden = 8;
  cfg.lstm_layers = 1;
  return cfg.validated();
}

bool params_equal(const ModelParams& a, const ModelParams& b) {
  bool equal = true;
  std::vector<const bmx::neural::Matrix*> ma, mb;
  bmx::neural::visit_params(a, [&](const std::string&,
                                   const bmx::neural::Matrix& m) {
    ma.push_back(&m);
  });
  bmx::neural::visit_params(b, [&](const std::string&,
                                   const bmx::neural::Matrix& m) {
    mb.push_back(&m);
  });
  for (std::size_t i = 0; i < ma.size(); ++i) {
    if (*ma[i] != *mb[i]) equal = false;
  }
  return equal;
}

}  // namespace

TEST_CASE("training learns a separable toy problem") {
  const auto data = toy_dataset(16, 100);
  const auto sv = view_of(data);
  TrainConfig tc;
  tc.lr = 3e-3;
  tc.max_epochs = 50;
  tc.patience = 49;
  tc.batch_size = 8;
  bmx::neural::TrainHistory hist;
  const auto params = bmx::neural::train(sv, sv, toy_config(), tc, 42, &hist);
  CHECK(bmx::neural::accuracy(params, sv) >= 0.99);

  SECTION("loss decreases over the first 10 epochs (smoothing window 3)") {
    REQUIRE(hist.train_loss.size() >= 10);
    auto smooth = [&](std::size_t i) {
      return (hist.train_loss[i] + hist.train_loss[i + 1] +
              hist.train_loss[i + 2]) /
             3.0;
    };
    for (std::size_t i = 0; i + 3 < 10; ++i) {
      CHECK(smooth(i + 1) <= smooth(i) + 1e-9);
    }
    CHECK(smooth(7) < smooth(0));
  }
}

TEST_CASE("lr = 0 leaves parameters untouched") {
  const auto data = toy_dataset(4, 7);
  const auto sv = view_of(data);
  TrainConfig tc;
  tc.lr = 0.0;
  tc.weight_decay = 0.1;  // decay is lr-scaled, so it must not act either
  tc.batch_size = 4;
  tc.patience = 0;
  tc.max_epochs = 1;
  const auto one = bmx::neural::train(sv, {}, toy_config(), tc, 5);
  tc.max_epochs = 5;
  tc.patience = 3;
  const auto five = bmx::neural::train(sv, {}, toy_config(), tc, 5);
  CHECK(params_equal(one, five));
}

TEST_CASE("fixed seed reproduces the loss curve bitwise") {
  const auto data = toy_dataset(6, 9);
  const auto sv = view_of(data);
  TrainConfig tc;
  tc.lr = 1e-3;
  tc.max_epochs = 6;
  tc.patience = 5;
  tc.batch_size = 4;
  bmx::neural::TrainHistory h1, h2;
  const auto p1 = bmx::neural::train(sv, sv, toy_config(), tc, 31, &h1);
  const auto p2 = bmx::neural::train(sv, sv, toy_config(), tc, 31, &h2);
  CHECK(h1.train_loss == h2.train_loss);
  CHECK(h1.val_acc == h2.val_acc);
  CHECK(params_equal(p1, p2));
}

TEST_CASE("parallel gradient accumulation matches sequential") {
  const auto data = toy_dataset(8, 13);
  const auto sv = view_of(data);
  const auto cfg = toy_config();
  const auto params = bmx::neural::init_params(cfg, 3);
  std::vector<std::size_t> batch(sv.size());
  std::iota(batch.begin(), batch.end(), 0);

  auto seq = bmx::neural::zeros_like(params);
  auto par = bmx::neural::zeros_like(params);
  const double loss_seq =
      bmx::neural::batch_gradients(params, sv, batch, 77, 1, seq);
  const double loss_par =
      bmx::neural::batch_gradients(params, sv, batch, 77, 4, par);
  CHECK(std::abs(loss_seq - loss_par) <= 1e-10 * std::max(1.0, loss_seq));

  std::vector<const bmx::neural::Matrix*> ms, mp;
  bmx::neural::visit_params(seq, [&](const std::string&,
                                     const bmx::neural::Matrix& m) {
    ms.push_back(&m);
  });
  bmx::neural::visit_params(par, [&](const std::string&,
                                     const bmx::neural::Matrix& m) {
    mp.push_back(&m);
  });
  double worst = 0.0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const double scale = std::max(1.0, ms[i]->cwiseAbs().maxCoeff());
    worst = std::max(worst, (*ms[i] - *mp[i]).cwiseAbs().maxCoeff() / scale);
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("evaluate") {
  const auto data = toy_dataset(20, 21);
  const auto sv = view_of(data);

  SECTION("a perfect classifier scores 100% on every fold") {
    TrainConfig tc;
    tc.lr = 3e-3;
    tc.max_epochs = 50;
    tc.patience = 49;
    tc.batch_size = 8;
    const auto params = bmx::neural::train(sv, sv, toy_config(), tc, 4);
    REQUIRE(bmx::neural::accuracy(params, sv) == 1.0);
    const auto stats = bmx::neural::evaluate(sv, params, 5);
    for (double acc : stats.per_fold) CHECK(acc == 1.0);
    CHECK(stats.mean == 1.0);
    CHECK(stats.stddev == 0.0);
  }

  SECTION("a constant predictor sits at chance level on balanced labels") {
    // untrained head with zero weights predicts one fixed class
    ModelConfig cfg = toy_config();
    cfg.classes = 6;
    auto params = bmx::neural::init_params(cfg, 8);
    params.head.w.setZero();
    params.head.b.setZero();
    std::vector<RdmSequence> six;
    bmx::Rng rng(3);
    for (int i = 0; i < 600; ++i) {
      RdmSequence s;
      s.tensor = bmx::Tensor4<double>(4, 4, 1, 3);
      s.beam_angles_deg = {0.0};
      s.label = static_cast<int>(rng.uniform_index(6));
      for (auto& v : s.tensor.data()) v = rng.uniform01();
      six.push_back(std::move(s));
    }
    const double acc = bmx::neural::accuracy(params, view_of(six));
    CHECK(acc == Catch::Approx(1.0 / 6.0).margin(0.05));
  }

  SECTION("fold mean tracks the pooled accuracy") {
    TrainConfig tc;
    tc.lr = 3e-3;
    tc.max_epochs = 30;
    tc.patience = 29;
    tc.batch_size = 8;
    const auto params = bmx::neural::train(sv, sv, toy_config(), tc, 10);
    const double pooled = bmx::neural::accuracy(params, sv);
    const auto stats = bmx::neural::evaluate(sv, params, 5);
    CHECK(std::abs(stats.mean - pooled) <= 0.05);
  }

  SECTION("k < 2 is rejected") {
    const auto params = bmx::neural::init_params(toy_config(), 2);
    CHECK_THROWS_AS(bmx::neural::evaluate(sv, params, 1), bmx::Error);
  }
}
