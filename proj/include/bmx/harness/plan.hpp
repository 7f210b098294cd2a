// bmx/harness/plan.hpp
//
// Experiment plans: the fully-resolved description of a study run. A plan
// (plus the code version) is sufficient to reproduce every output byte.

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

#include <cmath>
#include <string>
#include <vector>

#include "bmx/augment.hpp"
#include "bmx/errors.hpp"
#include "bmx/gestures.hpp"
#include "bmx/io/config_json.hpp"
#include "bmx/neural/train.hpp"
#include "bmx/phased_array.hpp"
#include "bmx/waveform.hpp"

namespace bmx::harness {

/// Synthetic data-collection scenario: who performs what, where, under
/// which radar configuration. Defaults form the "default low-SNR scenario"
/// every acceptance study runs on: subject at boresight, 1.5 m, four beams.
struct ScenarioConfig {
  std::size_t classes = kGestureClasses;
  std::vector<double> orientations_deg = {0.0};
  std::size_t repetitions = 12;
  double distance_m = 1.5;
  double snr_db = -6.0;
  std::vector<double> beam_angles_deg = {-15.0, 0.0, 15.0, 30.0};
  ChirpConfig chirp;
  FrameConfig frame;
  double gate_center_m = 1.5;
  double gate_half_width_m = 0.25;
  std::size_t time_steps = 12;
  bool one_bounce = true;
  GestureJitter jitter;

  ScenarioConfig() {
    // study-scale radar: same resolutions as the production table but a
    // 64-sample / 16-chirp frame that keeps training cells affordable
    chirp.adc_samples = 64;
    frame.beams_per_frame = 4;
    frame.chirps_per_beam = 16;
    frame.chirps_per_frame = 64;
    frame.frame_rate_fps = 8.0;
  }

  /// Gated range-bin count implied by the chirp config and gate.
  std::size_t gated_range_bins() const {
    const double bin = range_bin_m(chirp.validated());
    const long lo = static_cast<long>(
        std::ceil((gate_center_m - gate_half_width_m) / bin - 1e-9));
    const long hi = static_cast<long>(
        std::floor((gate_center_m + gate_half_width_m) / bin + 1e-9));
    require(hi >= lo, ErrorCategory::kInvalidConfig,
            "scenario gate selects no range bins");
    return static_cast<std::size_t>(hi - lo + 1);
  }
};

struct ExperimentPlan {
  ScenarioConfig scenario;
  neural::ModelConfig model;   // dims are filled from data at run time
  neural::TrainConfig train;
  std::size_t folds = 5;
  std::uint64_t seed = 1;
  std::size_t workers = 2;

  // beam study: subsets of scenario.beam_angles_deg to compare
  std::vector<std::vector<double>> beam_sets;

  // augmentation study
  AugmentConfig augment;
  std::vector<std::size_t> augment_factors = {0, 3, 6, 9, 12, 15, 18, 21};

  // ablation study
  std::string ablation_knob = "attention_layers";
  std::vector<double> ablation_values = {0, 1, 2, 3};

  ExperimentPlan() {
    // study-scale model/training defaults; every value lands in the manifest
    model.attention_layers = 1;
    model.heads = 4;
    model.conv_layers = 2;
    model.conv_base_filters = 4;
    model.latent_dim = 32;
    model.dropout = 0.3;
    model.lstm_hidden = 32;
    model.lstm_layers = 1;
    train.lr = 1e-3;
    train.weight_decay = 1e-3;
    train.max_epochs = 30;
    train.patience = 12;
    train.batch_size = 16;
    // augmentation draws matched to the gated axis sizes
    augment.distance_range_m = 0.12;
    augment.velocity_range_mps = 0.14;
    augment.noise_sigma = 0.01;
    // singles, the aligned-beam pairs, and the full set
    beam_sets = {{-15.0}, {0.0},        {15.0},      {30.0},
                 {0.0, -15.0}, {0.0, 15.0}, {0.0, 30.0},
                 {-15.0, 0.0, 15.0, 30.0}};
  }

  const ExperimentPlan& validated() const {
    scenario.chirp.validated();
    scenario.frame.validated(scenario.chirp.validated());
    require(scenario.classes >= 2 && scenario.classes <= kGestureClasses,
            ErrorCategory::kInvalidConfig, "plan: classes must be 2..6");
    require(!scenario.orientations_deg.empty(), ErrorCategory::kInvalidConfig,
            "plan: need at least one orientation");
    require(scenario.beam_angles_deg.size() ==
                scenario.frame.beams_per_frame,
            ErrorCategory::kInvalidConfig,
            "plan: beam list must match beams_per_frame");
    require(folds >= 2, ErrorCategory::kInvalidConfig,
            "plan: need at least 2 folds");
    require(workers >= 1, ErrorCategory::kInvalidConfig,
            "plan: workers must be >= 1");

    // every referenced beam angle must be steerable: inside the usable
    // range of the Tx array at a 5-degree scan
    const auto usable = usable_steering_range(awr1843_geometry(), 5.0);
    auto is_usable = [&](double a) {
      for (double u : usable) {
        if (std::abs(u - a) < 1e-6) return true;
      }
      return false;
    };
    for (double a : scenario.beam_angles_deg) {
      require(is_usable(a), ErrorCategory::kInvalidConfig,
              "plan: beam angle outside the usable steering range: " +
                  std::to_string(a));
    }
    for (const auto& set : beam_sets) {
      require(!set.empty(), ErrorCategory::kInvalidConfig,
              "plan: empty beam set");
      for (double a : set) {
        bool found = false;
        for (double b : scenario.beam_angles_deg) {
          if (std::abs(a - b) < 1e-6) found = true;
        }
        require(found, ErrorCategory::kInvalidConfig,
                "plan: beam set references an angle the scenario lacks: " +
                    std::to_string(a));
      }
    }

    // attention head divisibility for the gated input
    const std::size_t d_model =
        scenario.gated_range_bins() * scenario.frame.chirps_per_beam;
    require(model.attention_layers == 0 || d_model % model.heads == 0,
            ErrorCategory::kInvalidConfig,
            "plan: gated range bins x doppler bins must be divisible by the "
            "head count");
    return *this;
  }
};

// ---------------------------------------------------------------------------
// JSON round trip (manifests are fully-resolved plans)

inline ExperimentPlan plan_from_json(const io::json& j) {
  ExperimentPlan p;
  if (j.contains("scenario")) {
    const io::json& s = j.at("scenario");
    io::detail::apply(s, "classes", p.scenario.classes);
    io::detail::apply(s, "orientations_deg", p.scenario.orientations_deg);
    io::detail::apply(s, "repetitions", p.scenario.repetitions);
    io::detail::apply(s, "distance_m", p.scenario.distance_m);
    io::detail::apply(s, "snr_db", p.scenario.snr_db);
    io::detail::apply(s, "beam_angles_deg", p.scenario.beam_angles_deg);
    if (s.contains("chirp")) {
      p.scenario.chirp = io::chirp_config_from_json(s.at("chirp"));
    }
    if (s.contains("frame")) {
      p.scenario.frame = io::frame_config_from_json(s.at("frame"));
    }
    io::detail::apply(s, "gate_center_m", p.scenario.gate_center_m);
    io::detail::apply(s, "gate_half_width_m", p.scenario.gate_half_width_m);
    io::detail::apply(s, "time_steps", p.scenario.time_steps);
    io::detail::apply(s, "one_bounce", p.scenario.one_bounce);
  }
  if (j.contains("model")) {
    const io::json& m = j.at("model");
    p.model = io::model_config_from_json(m);
    // plan-level model entries are overrides; dims stay data-driven
    p.model.range_bins = p.model.doppler_bins = p.model.beams =
        p.model.time_steps = 0;
  }
  if (j.contains("train")) p.train = io::train_config_from_json(j.at("train"));
  io::detail::apply(j, "folds", p.folds);
  io::detail::apply(j, "seed", p.seed);
  io::detail::apply(j, "workers", p.workers);
  io::detail::apply(j, "beam_sets", p.beam_sets);
  if (j.contains("augment")) {
    p.augment = io::augment_config_from_json(j.at("augment"));
    io::detail::apply(j.at("augment"), "factors", p.augment_factors);
  }
  if (j.contains("ablation")) {
    io::detail::apply(j.at("ablation"), "knob", p.ablation_knob);
    io::detail::apply(j.at("ablation"), "values", p.ablation_values);
  }
  p.validated();
  return p;
}

inline io::json plan_to_json(const ExperimentPlan& p) {
  io::json model = io::model_config_to_json(p.model);
  model.erase("range_bins");
  model.erase("doppler_bins");
  model.erase("beams");
  model.erase("time_steps");
  io::json aug = io::augment_config_to_json(p.augment);
  aug.erase("factor");
  aug["factors"] = p.augment_factors;
  return io::json{
      {"scenario",
       {{"classes", p.scenario.classes},
        {"orientations_deg", p.scenario.orientations_deg},
        {"repetitions", p.scenario.repetitions},
        {"distance_m", p.scenario.distance_m},
        {"snr_db", p.scenario.snr_db},
        {"beam_angles_deg", p.scenario.beam_angles_deg},
        // fully resolved: the derived slope lands in the manifest
        {"chirp", io::chirp_config_to_json(p.scenario.chirp.validated())},
        {"frame", io::frame_config_to_json(p.scenario.frame)},
        {"gate_center_m", p.scenario.gate_center_m},
        {"gate_half_width_m", p.scenario.gate_half_width_m},
        {"time_steps", p.scenario.time_steps},
        {"one_bounce", p.scenario.one_bounce}}},
      {"model", model},
      {"train", io::train_config_to_json(p.train)},
      {"folds", p.folds},
      {"seed", p.seed},
      {"workers", p.workers},
      {"beam_sets", p.beam_sets},
      {"augment", aug},
      {"ablation", {{"knob", p.ablation_knob}, {"values", p.ablation_values}}}};
}

}  // namespace bmx::harness
