// bmx/scene_sim.hpp
//
// Raw ADC synthesis for moving multipath scenes under steered Tx beams.
// Each path contributes one IF tone (beat frequency S*tau) with a
// chirp-to-chirp Doppler phase progression; paths are summed per
// y(t) = sum_m A_m e^{j phi_m} e^{-j 2 pi f tau_m} and complex white
// Gaussian noise is calibrated against the summed signal power.

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
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "bmx/errors.hpp"
#include "bmx/phased_array.hpp"
#include "bmx/rng.hpp"
#include "bmx/waveform.hpp"

namespace bmx {

/// Point reflector in the range-azimuth plane.
/// radial_velocity_mps > 0 means the range is increasing (receding).
struct Scatterer {
  double range_m = 1.5;
  double azimuth_rad = 0.0;
  double radial_velocity_mps = 0.0;
  double rcs_dbsm = -35.0;  // human hand scale

  Scatterer validated() const {
    require(range_m > 0.0, ErrorCategory::kInvalidArgument,
            "scatterer range must be positive");
    require(std::abs(azimuth_rad) < M_PI / 2.0, ErrorCategory::kInvalidArgument,
            "scatterer azimuth must satisfy |az| < 90 degrees");
    return *this;
  }
};

/// One propagation path between Tx and Rx.
/// radial_velocity_mps is half the rate of change of the total path length,
/// i.e. the velocity the Doppler axis reports for this path.
struct Path {
  double attenuation = 0.0;  // A_m
  double phase_rad = 0.0;    // phi_m, path length mod lambda
  double delay_s = 0.0;      // tau_m
  double radial_velocity_mps = 0.0;
};

struct BounceSpec {
  bool one_bounce = false;
};

namespace detail {
inline void polar_to_xy(const Scatterer& s, double& x, double& y) {
  x = s.range_m * std::sin(s.azimuth_rad);
  y = s.range_m * std::cos(s.azimuth_rad);
}
}  // namespace detail

/// Direct path per scatterer plus (optionally) every ordered one-bounce pair.
/// Amplitudes scale with the transmit field gain at the departure azimuth,
/// sqrt of the RCS product, and spherical spreading over each leg.
inline std::vector<Path> enumerate_paths(const std::vector<Scatterer>& scene,
                                         const SteeringVector& beam,
                                         const ArrayGeometry& geom,
                                         const BounceSpec& bounce = {}) {
  require(!scene.empty(), ErrorCategory::kInvalidArgument,
          "enumerate_paths: empty scene");
  std::vector<Path> paths;
  paths.reserve(scene.size() * (bounce.one_bounce ? scene.size() : 1));
  const double lambda = geom.wavelength_m;
  for (const Scatterer& s : scene) {
    s.validated();
    const double sigma = std::pow(10.0, s.rcs_dbsm / 10.0);
    const double length = 2.0 * s.range_m;
    Path p;
    p.attenuation = field_gain(geom, beam, s.azimuth_rad) * std::sqrt(sigma) /
                    (s.range_m * s.range_m);
    p.delay_s = length / kSpeedOfLight;
    p.phase_rad = detail::wrap_2pi(2.0 * M_PI * std::fmod(length, lambda) /
                                   lambda);
    p.radial_velocity_mps = s.radial_velocity_mps;
    paths.push_back(p);
  }
  if (bounce.one_bounce) {
    for (std::size_t i = 0; i < scene.size(); ++i) {
      for (std::size_t j = 0; j < scene.size(); ++j) {
        if (i == j) continue;
        const Scatterer& a = scene[i];
        const Scatterer& b = scene[j];
        double ax, ay, bx, by;
        detail::polar_to_xy(a, ax, ay);
        detail::polar_to_xy(b, bx, by);
        const double dij = std::hypot(ax - bx, ay - by);
        if (dij <= 1e-6) continue;  // coincident scatterers, no bounce leg
        const double sigma_a = std::pow(10.0, a.rcs_dbsm / 10.0);
        const double sigma_b = std::pow(10.0, b.rcs_dbsm / 10.0);
        const double length = a.range_m + dij + b.range_m;
        Path p;
        // Tx beam gain applies at the departure azimuth only; the return
        // leg arrives at the (unsteered) Rx.
        p.attenuation = field_gain(geom, beam, a.azimuth_rad) *
                        std::sqrt(sigma_a * sigma_b) /
                        (a.range_m * dij * b.range_m);
        p.delay_s = length / kSpeedOfLight;
        p.phase_rad = detail::wrap_2pi(2.0 * M_PI * std::fmod(length, lambda) /
                                       lambda);
        // dL/dt ~= v_a + v_b with the inter-scatterer leg held fixed
        p.radial_velocity_mps =
            0.5 * (a.radial_velocity_mps + b.radial_velocity_mps);
        paths.push_back(p);
      }
    }
  }
  return paths;
}

/// Complex ADC cube for one frame: [beam][chirp][sample], doubles.
struct RawFrame {
  std::size_t adc_samples = 0;
  std::size_t chirps_per_beam = 0;
  std::size_t beams = 0;
  std::vector<std::complex<double>> data;
  std::size_t discarded_paths = 0;  // warning count, delays off the ramp

  RawFrame() = default;
  RawFrame(std::size_t samples, std::size_t chirps, std::size_t nbeams)
      : adc_samples(samples),
        chirps_per_beam(chirps),
        beams(nbeams),
        data(samples * chirps * nbeams, {0.0, 0.0}) {}

  std::complex<double>& at(std::size_t b, std::size_t k, std::size_t n) {
    return data[(b * chirps_per_beam + k) * adc_samples + n];
  }
  const std::complex<double>& at(std::size_t b, std::size_t k,
                                 std::size_t n) const {
    return data[(b * chirps_per_beam + k) * adc_samples + n];
  }
};

inline constexpr double kNoiselessSnrDb =
    std::numeric_limits<double>::infinity();

/// Synthesizes one frame from per-beam path lists. Each beam runs on its own
/// slow-time clock (inter-beam latency is not modeled), so identical path
/// lists produce identical per-beam cubes.
inline RawFrame synthesize_frame(
    const std::vector<std::vector<Path>>& paths_per_beam,
    const ChirpConfig& cfg, const FrameConfig& frame, double snr_db, Rng& rng) {
  const ChirpConfig c = cfg.validated();
  const FrameConfig f = frame.validated(c);
  require(paths_per_beam.size() == f.beams_per_frame,
          ErrorCategory::kInvalidArgument,
          "synthesize_frame: path lists must match beams_per_frame");
  require(f.chirps_per_beam >= 1, ErrorCategory::kInvalidConfig,
          "synthesize_frame: need at least one chirp per beam");

  RawFrame out(c.adc_samples, f.chirps_per_beam, f.beams_per_frame);
  const double lambda = c.wavelength_m();
  const double ramp = c.effective_sweep_s();
  for (std::size_t b = 0; b < f.beams_per_frame; ++b) {
    for (const Path& p : paths_per_beam[b]) {
      require(p.delay_s >= 0.0, ErrorCategory::kInvalidArgument,
              "path delay must be nonnegative");
      require(p.delay_s < c.chirp_duration_s, ErrorCategory::kInvalidArgument,
              "path delay exceeds chirp duration");
      if (p.delay_s >= ramp) {
        ++out.discarded_paths;
        continue;
      }
      const double beat_hz = c.slope_hz_per_s * p.delay_s;
      const double doppler_step =
          4.0 * M_PI * p.radial_velocity_mps * c.chirp_duration_s / lambda;
      for (std::size_t k = 0; k < f.chirps_per_beam; ++k) {
        const double chirp_phase =
            p.phase_rad + doppler_step * static_cast<double>(k);
        for (std::size_t n = 0; n < c.adc_samples; ++n) {
          const double t = static_cast<double>(n) / c.adc_rate_sps;
          const double phase = 2.0 * M_PI * beat_hz * t + chirp_phase;
          out.at(b, k, n) += p.attenuation *
                             std::complex<double>(std::cos(phase),
                                                  std::sin(phase));
        }
      }
    }
  }

  if (std::isfinite(snr_db)) {
    double power = 0.0;
    for (const auto& v : out.data) power += std::norm(v);
    power /= static_cast<double>(out.data.size());
    if (power > 0.0) {
      const double noise_power = power / std::pow(10.0, snr_db / 10.0);
      const double sigma = std::sqrt(noise_power / 2.0);
      for (auto& v : out.data) {
        v += std::complex<double>(rng.normal(0.0, sigma),
                                  rng.normal(0.0, sigma));
      }
    }
  }
  return out;
}

/// A full gesture capture: one RawFrame per time step plus the radar
/// parameters needed to process it.
struct RawCapture {
  ChirpConfig chirp;
  FrameConfig frame;
  std::vector<double> beam_angles_deg;
  std::vector<RawFrame> frames;
  int label = -1;
};

}  // namespace bmx
