// tests/test_gradcheck.cpp
//
// Central finite-difference verification of every parameter matrix of the
// small-config model, double precision.

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

#include <map>
#include <string>

#include "bmx/neural/model.hpp"
#include "bmx/rng.hpp"

using bmx::neural::Matrix;
using bmx::neural::ModelConfig;
using bmx::neural::ModelParams;

namespace {

double loss_of(const ModelParams& params, const bmx::Tensor4<double>& x,
               int label) {
  return bmx::neural::cross_entropy(bmx::neural::forward(params, x), label);
}

/// max relative error per parameter group (matrix name with the layer index
/// stripped is close enough to a group id).
std::map<std::string, double> gradcheck(const ModelConfig& cfg,
                                        std::uint64_t seed) {
  ModelParams params = bmx::neural::init_params(cfg, seed);
  bmx::Tensor4<double> x(cfg.range_bins, cfg.doppler_bins, cfg.beams,
                         cfg.time_steps);
  bmx::Rng rng(seed + 1);
  // amplified inputs push the attention score gradients out of the
  // numerically-degenerate near-uniform-softmax regime
  for (auto& v : x.data()) v = rng.uniform(0.0, 6.0);
  const int label = static_cast<int>(seed % cfg.classes);

  ModelParams grads = bmx::neural::zeros_like(params);
  bmx::neural::ForwardCache cache;
  bmx::neural::forward(params, x, false, nullptr, &cache);
  bmx::neural::backward(params, x, cache, label, grads);

  std::map<std::string, double> worst;
  std::vector<std::pair<std::string, Matrix*>> blocks;
  bmx::neural::visit_params(params,
                            [&](const std::string& n, Matrix& m) {
                              blocks.emplace_back(n, &m);
                            });
  std::vector<Matrix*> grad_blocks;
  bmx::neural::visit_params(grads, [&](const std::string&, Matrix& m) {
    grad_blocks.push_back(&m);
  });

  // central differences leave ~1e-11 of roundoff on the loss; the 1e-6
  // denominator floor keeps that noise from swamping near-zero gradients
  const double h = 1e-5;
  for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
    Matrix& m = *blocks[bi].second;
    const Matrix& g = *grad_blocks[bi];
    double& group_worst = worst[blocks[bi].first];
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double orig = m.data()[i];
      m.data()[i] = orig + h;
      const double up = loss_of(params, x, label);
      m.data()[i] = orig - h;
      const double dn = loss_of(params, x, label);
      m.data()[i] = orig;
      const double numeric = (up - dn) / (2.0 * h);
      const double analytic = g.data()[i];
      const double rel = std::abs(analytic - numeric) /
                         std::max(1e-6, std::abs(analytic) + std::abs(numeric));
      group_worst = std::max(group_worst, rel);
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("gradients match central finite differences") {
  ModelConfig cfg;
  cfg.range_bins = 4;
  cfg.doppler_bins = 3;
  cfg.beams = 2;
  cfg.time_steps = 2;
  cfg.classes = 3;
  cfg.attention_layers = 2;
  cfg.heads = 2;
  cfg.conv_layers = 2;
  cfg.conv_base_filters = 2;
  cfg.latent_dim = 5;
  cfg.dropout = 0.0;  // deterministic loss for differencing
  cfg.lstm_hidden = 6;
  cfg.lstm_layers = 2;

  const auto worst = gradcheck(cfg, 3);
  for (const auto& [group, rel] : worst) {
    INFO(group << " max relative error " << rel);
    CHECK(rel < 1e-4);
  }
}

TEST_CASE("gradients stay correct with attention disabled and one conv") {
  ModelConfig cfg;
  cfg.range_bins = 3;
  cfg.doppler_bins = 4;
  cfg.beams = 2;
  cfg.time_steps = 3;
  cfg.classes = 4;
  cfg.attention_layers = 0;
  cfg.heads = 1;
  cfg.conv_layers = 1;
  cfg.conv_base_filters = 3;
  cfg.latent_dim = 4;
  cfg.dropout = 0.0;
  cfg.lstm_hidden = 4;
  cfg.lstm_layers = 1;

  const auto worst = gradcheck(cfg, 11);
  for (const auto& [group, rel] : worst) {
    INFO(group << " max relative error " << rel);
    CHECK(rel < 1e-4);
  }
}

TEST_CASE("multi-head gradients across several seeds") {
  ModelConfig cfg;
  cfg.range_bins = 2;
  cfg.doppler_bins = 4;  // d_model 8, 4 heads of dk 2
  cfg.beams = 3;
  cfg.time_steps = 2;
  cfg.classes = 3;
  cfg.attention_layers = 1;
  cfg.heads = 4;
  cfg.conv_layers = 1;
  cfg.conv_base_filters = 2;
  cfg.latent_dim = 4;
  cfg.dropout = 0.0;
  cfg.lstm_hidden = 3;
  cfg.lstm_layers = 1;

  for (std::uint64_t seed : {5u, 6u, 7u}) {
    const auto worst = gradcheck(cfg, seed);
    for (const auto& [group, rel] : worst) {
      INFO("seed " << seed << " " << group << " rel " << rel);
      CHECK(rel < 1e-4);
    }
  }
}
