// bmx/waveform.hpp
//
// FMCW chirp/frame parameterization and the analytic range/Doppler
// relations every other stage depends on.

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
#include <cstddef>

#include "bmx/errors.hpp"

namespace bmx {

/// Speed of light, SI exact.
inline constexpr double kSpeedOfLight = 299792458.0;

/// One linear frequency ramp. The effective sweep covers only the sampled
/// part of the ramp: slope * (adc_samples / adc_rate) == bandwidth.
struct ChirpConfig {
  double bandwidth_hz = 3.61847e9;      // B
  double slope_hz_per_s = 0.0;          // S, derived when 0 (see validated())
  double chirp_duration_s = 1.7381288e-3;  // T_c, chirp-to-chirp period
  double carrier_hz = 77.0e9;           // f
  std::size_t adc_samples = 256;
  double adc_rate_sps = 5.0e6;          // 5,000 ksps

  double wavelength_m() const { return kSpeedOfLight / carrier_hz; }

  /// Sampled portion of the ramp; beat tones must live inside it.
  double effective_sweep_s() const {
    return static_cast<double>(adc_samples) / adc_rate_sps;
  }

  /// Returns a copy with the slope derived from B and the sweep time when
  /// unset, after validating all invariants.
  ChirpConfig validated() const {
    ChirpConfig c = *this;
    require(c.bandwidth_hz > 0.0, ErrorCategory::kInvalidConfig,
            "chirp bandwidth must be positive");
    require(c.carrier_hz > 0.0, ErrorCategory::kInvalidConfig,
            "carrier frequency must be positive");
    require(c.adc_samples >= 2, ErrorCategory::kInvalidConfig,
            "need at least 2 ADC samples");
    require(c.adc_rate_sps > 0.0, ErrorCategory::kInvalidConfig,
            "ADC rate must be positive");
    if (c.slope_hz_per_s == 0.0) {
      c.slope_hz_per_s = c.bandwidth_hz / c.effective_sweep_s();
    }
    require(c.slope_hz_per_s > 0.0, ErrorCategory::kInvalidConfig,
            "chirp slope must be positive");
    const double swept = c.slope_hz_per_s * c.effective_sweep_s();
    require(std::abs(swept - c.bandwidth_hz) <= 1e-9 * c.bandwidth_hz,
            ErrorCategory::kInvalidConfig,
            "slope * effective sweep time must equal bandwidth");
    require(c.effective_sweep_s() <= c.chirp_duration_s,
            ErrorCategory::kInvalidConfig,
            "ADC sampling window exceeds chirp duration");
    return c;
  }
};

/// Chirps are grouped into frames; within a frame the Tx beam changes every
/// chirps_per_beam chirps, so one frame yields one RDM per beam.
struct FrameConfig {
  std::size_t chirps_per_frame = 160;  // F
  double frame_rate_fps = 3.5;
  std::size_t beams_per_frame = 4;
  std::size_t chirps_per_beam = 40;

  FrameConfig validated(const ChirpConfig& chirp) const {
    require(beams_per_frame >= 1 && chirps_per_beam >= 1,
            ErrorCategory::kInvalidConfig, "beams and chirps must be >= 1");
    require(beams_per_frame * chirps_per_beam == chirps_per_frame,
            ErrorCategory::kInvalidConfig,
            "beams_per_frame * chirps_per_beam must equal chirps_per_frame");
    require(frame_rate_fps > 0.0, ErrorCategory::kInvalidConfig,
            "frame rate must be positive");
    const double period = 1.0 / frame_rate_fps;
    require(period >= static_cast<double>(chirps_per_frame) *
                          chirp.chirp_duration_s -
                      1e-12,
            ErrorCategory::kInvalidConfig,
            "frame period shorter than the chirps it must hold");
    return *this;
  }
};

/// Range Resolution = c / 2B.
inline double range_resolution(const ChirpConfig& cfg) {
  require(cfg.bandwidth_hz > 0.0, ErrorCategory::kInvalidConfig,
          "range_resolution: bandwidth must be positive");
  return kSpeedOfLight / (2.0 * cfg.bandwidth_hz);
}

/// Radial velocity from the phase difference between two chirps:
/// v = lambda * dphi / (4 * pi * T_c). Positive phase slope corresponds to
/// increasing range (receding target) under the synthesis convention.
inline double doppler_velocity(double delta_phase_rad, const ChirpConfig& cfg) {
  require(cfg.carrier_hz > 0.0 && cfg.chirp_duration_s > 0.0,
          ErrorCategory::kInvalidConfig,
          "doppler_velocity: invalid chirp config");
  return cfg.wavelength_m() * delta_phase_rad /
         (4.0 * M_PI * cfg.chirp_duration_s);
}

/// Beat-tone frequency to range: tau = df / S, d = c * tau / 2.
inline double beat_frequency_to_range(double delta_f_hz,
                                      const ChirpConfig& cfg) {
  require(cfg.slope_hz_per_s > 0.0, ErrorCategory::kInvalidConfig,
          "beat_frequency_to_range: slope must be positive");
  const double tau = delta_f_hz / cfg.slope_hz_per_s;
  return kSpeedOfLight * tau / 2.0;
}

/// Width of one Doppler-FFT bin in m/s for an F-point FFT over one beam's
/// chirps: lambda / (2 * F * T_c).
inline double doppler_bin_mps(const ChirpConfig& cfg,
                              std::size_t chirps_per_beam) {
  require(chirps_per_beam >= 2, ErrorCategory::kInvalidConfig,
          "doppler_bin_mps: need at least 2 chirps");
  return cfg.wavelength_m() /
         (2.0 * static_cast<double>(chirps_per_beam) * cfg.chirp_duration_s);
}

/// Width of one Range-FFT bin in meters. With slope * sweep == bandwidth this
/// equals range_resolution exactly.
inline double range_bin_m(const ChirpConfig& cfg) {
  const double bin_hz = cfg.adc_rate_sps / static_cast<double>(cfg.adc_samples);
  return beat_frequency_to_range(bin_hz, cfg);
}

/// Unambiguous velocity interval half-width: lambda / (4 * T_c). Synthesized
/// Doppler beyond this folds back into [-vmax, +vmax).
inline double max_unambiguous_velocity(const ChirpConfig& cfg) {
  return cfg.wavelength_m() / (4.0 * cfg.chirp_duration_s);
}

}  // namespace bmx
