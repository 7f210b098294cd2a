// bmx/io/config_json.hpp
//
// JSON (de)serialization for configuration types and scene scripts. Parsing
// is override-style: absent keys keep their defaults, unknown keys are
// rejected where noted. All physical quantities in files are SI.

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

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

#include "bmx/augment.hpp"
#include "bmx/errors.hpp"
#include "bmx/gestures.hpp"
#include "bmx/neural/model.hpp"
#include "bmx/neural/train.hpp"
#include "bmx/phased_array.hpp"
#include "bmx/waveform.hpp"

namespace bmx::io {

using nlohmann::json;

namespace detail {

template <typename T>
void apply(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace detail

inline json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCategory::kIoError, "cannot open: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCategory::kBadFormat,
                "invalid JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

inline void save_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  require(out.good(), ErrorCategory::kIoError,
          "cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
  require(out.good(), ErrorCategory::kIoError, "write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// waveform configs

inline ChirpConfig chirp_config_from_json(const json& j) {
  ChirpConfig c;
  detail::apply(j, "bandwidth_hz", c.bandwidth_hz);
  detail::apply(j, "slope_hz_per_s", c.slope_hz_per_s);
  detail::apply(j, "chirp_duration_s", c.chirp_duration_s);
  detail::apply(j, "carrier_hz", c.carrier_hz);
  detail::apply(j, "adc_samples", c.adc_samples);
  detail::apply(j, "adc_rate_sps", c.adc_rate_sps);
  return c.validated();
}

inline json chirp_config_to_json(const ChirpConfig& c) {
  return json{{"bandwidth_hz", c.bandwidth_hz},
              {"slope_hz_per_s", c.slope_hz_per_s},
              {"chirp_duration_s", c.chirp_duration_s},
              {"carrier_hz", c.carrier_hz},
              {"adc_samples", c.adc_samples},
              {"adc_rate_sps", c.adc_rate_sps}};
}

inline FrameConfig frame_config_from_json(const json& j) {
  FrameConfig f;
  detail::apply(j, "chirps_per_frame", f.chirps_per_frame);
  detail::apply(j, "frame_rate_fps", f.frame_rate_fps);
  detail::apply(j, "beams_per_frame", f.beams_per_frame);
  detail::apply(j, "chirps_per_beam", f.chirps_per_beam);
  if (!j.contains("chirps_per_frame")) {
    f.chirps_per_frame = f.beams_per_frame * f.chirps_per_beam;
  }
  return f;
}

inline json frame_config_to_json(const FrameConfig& f) {
  return json{{"chirps_per_frame", f.chirps_per_frame},
              {"frame_rate_fps", f.frame_rate_fps},
              {"beams_per_frame", f.beams_per_frame},
              {"chirps_per_beam", f.chirps_per_beam}};
}

inline ArrayGeometry array_geometry_from_json(const json& j) {
  if (j.contains("preset")) {
    const std::string preset = j.at("preset").get<std::string>();
    require(preset == "awr1843", ErrorCategory::kInvalidConfig,
            "unknown array preset: " + preset);
    double carrier = 77.0e9;
    detail::apply(j, "carrier_hz", carrier);
    return awr1843_geometry(carrier);
  }
  ArrayGeometry g;
  require(j.contains("element_offsets_m"), ErrorCategory::kInvalidConfig,
          "array geometry needs element_offsets_m or a preset");
  g.element_offsets_m = j.at("element_offsets_m").get<std::vector<double>>();
  detail::apply(j, "wavelength_m", g.wavelength_m);
  detail::apply(j, "element_cos_exponent", g.element_cos_exponent);
  return g.validated();
}

// ---------------------------------------------------------------------------
// augmentation

inline AugmentConfig augment_config_from_json(const json& j) {
  AugmentConfig c;
  detail::apply(j, "distance_range_m", c.distance_range_m);
  detail::apply(j, "velocity_range_mps", c.velocity_range_mps);
  detail::apply(j, "noise_sigma", c.noise_sigma);
  detail::apply(j, "factor", c.factor);
  return c.validated();
}

inline json augment_config_to_json(const AugmentConfig& c) {
  return json{{"distance_range_m", c.distance_range_m},
              {"velocity_range_mps", c.velocity_range_mps},
              {"noise_sigma", c.noise_sigma},
              {"factor", c.factor}};
}

// ---------------------------------------------------------------------------
// model / training

inline neural::ModelConfig model_config_from_json(const json& j) {
  neural::ModelConfig c;
  detail::apply(j, "range_bins", c.range_bins);
  detail::apply(j, "doppler_bins", c.doppler_bins);
  detail::apply(j, "beams", c.beams);
  detail::apply(j, "time_steps", c.time_steps);
  detail::apply(j, "classes", c.classes);
  detail::apply(j, "attention_layers", c.attention_layers);
  detail::apply(j, "heads", c.heads);
  detail::apply(j, "conv_layers", c.conv_layers);
  detail::apply(j, "conv_base_filters", c.conv_base_filters);
  detail::apply(j, "kernel", c.kernel);
  detail::apply(j, "latent_dim", c.latent_dim);
  detail::apply(j, "dropout", c.dropout);
  detail::apply(j, "lstm_hidden", c.lstm_hidden);
  detail::apply(j, "lstm_layers", c.lstm_layers);
  return c;
}

inline json model_config_to_json(const neural::ModelConfig& c) {
  return json{{"range_bins", c.range_bins},
              {"doppler_bins", c.doppler_bins},
              {"beams", c.beams},
              {"time_steps", c.time_steps},
              {"classes", c.classes},
              {"attention_layers", c.attention_layers},
              {"heads", c.heads},
              {"conv_layers", c.conv_layers},
              {"conv_base_filters", c.conv_base_filters},
              {"kernel", c.kernel},
              {"latent_dim", c.latent_dim},
              {"dropout", c.dropout},
              {"lstm_hidden", c.lstm_hidden},
              {"lstm_layers", c.lstm_layers}};
}

inline neural::TrainConfig train_config_from_json(const json& j) {
  neural::TrainConfig c;
  detail::apply(j, "lr", c.lr);
  detail::apply(j, "weight_decay", c.weight_decay);
  detail::apply(j, "max_epochs", c.max_epochs);
  detail::apply(j, "patience", c.patience);
  detail::apply(j, "batch_size", c.batch_size);
  detail::apply(j, "threads", c.threads);
  return c.validated();
}

inline json train_config_to_json(const neural::TrainConfig& c) {
  return json{{"lr", c.lr},
              {"weight_decay", c.weight_decay},
              {"max_epochs", c.max_epochs},
              {"patience", c.patience},
              {"batch_size", c.batch_size},
              {"threads", c.threads}};
}

// ---------------------------------------------------------------------------
// scene scripts
//
// Two forms:
//   {"gesture": {"class": 3, "orientation_deg": 0, "distance_m": 1.5,
//                "frame_rate_fps": 3.5, "seed": 7}}         (class is G-number)
//   {"label": 3, "trajectory": [[{"range_m":.., "azimuth_deg":..,
//                "velocity_mps":.., "rcs_dbsm":..}, ...], ...]}

inline GestureScript gesture_script_from_json(const json& j,
                                              double frame_rate_fps) {
  if (j.contains("gesture")) {
    const json& g = j.at("gesture");
    require(g.contains("class"), ErrorCategory::kBadFormat,
            "gesture script needs a class (1..6)");
    const int gnum = g.at("class").get<int>();
    require(gnum >= 1 && gnum <= kGestureClasses, ErrorCategory::kBadFormat,
            "gesture class must be 1..6");
    double orientation = 0.0, distance = 1.5;
    std::uint64_t seed = 1;
    double rate = frame_rate_fps;
    detail::apply(g, "orientation_deg", orientation);
    detail::apply(g, "distance_m", distance);
    detail::apply(g, "seed", seed);
    detail::apply(g, "frame_rate_fps", rate);
    return make_gesture_script(gnum - 1, orientation, distance, rate, seed);
  }
  require(j.contains("trajectory"), ErrorCategory::kBadFormat,
          "scene script needs either a gesture or a trajectory");
  GestureScript script;
  script.label = j.value("label", 1) - 1;
  for (const json& step : j.at("trajectory")) {
    std::vector<Scatterer> scene;
    for (const json& sj : step) {
      Scatterer s;
      s.range_m = sj.at("range_m").get<double>();
      s.azimuth_rad = deg2rad(sj.value("azimuth_deg", 0.0));
      s.radial_velocity_mps = sj.value("velocity_mps", 0.0);
      s.rcs_dbsm = sj.value("rcs_dbsm", -35.0);
      scene.push_back(s.validated());
    }
    require(!scene.empty(), ErrorCategory::kBadFormat,
            "trajectory step with no scatterers");
    script.trajectory.push_back(std::move(scene));
  }
  require(!script.trajectory.empty(), ErrorCategory::kBadFormat,
          "empty trajectory");
  script.duration_s =
      static_cast<double>(script.trajectory.size()) / frame_rate_fps;
  return script;
}

}  // namespace bmx::io
