// bmx/phased_array.hpp
//
// Steering vectors, quantized phase-shifter words, and far-field patterns
// for a linear Tx array. Reproduces the +/-30 degree usable steering limit
// of a wavelength-spaced 3-element array.

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
#include <complex>
#include <cstdint>
#include <vector>

#include "bmx/errors.hpp"
#include "bmx/waveform.hpp"

namespace bmx {

inline constexpr double kPhaseShifterStepDeg = 5.625;  // 64-step register
inline constexpr int kPhaseShifterSteps = 64;

inline double deg2rad(double d) { return d * M_PI / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / M_PI; }

/// Linear Tx array. Offsets are measured from the reference element
/// (element_offsets_m[0] == 0, strictly increasing).
///
/// element_cos_exponent models the per-element patch pattern as cos(az)^q in
/// field amplitude; 0 means isotropic elements. The preset uses the exponent
/// matching a +/-28 degree azimuth 3 dB beamwidth, which is what makes side
/// lobes overtake the main lobe beyond 30 degrees on wavelength-spaced
/// arrays (an ideal isotropic array factor is exactly periodic in sin(az),
/// so main and grating lobes tie and no steering limit would ever appear).
struct ArrayGeometry {
  std::vector<double> element_offsets_m;
  double wavelength_m = kSpeedOfLight / 77.0e9;
  double element_cos_exponent = 0.0;

  ArrayGeometry validated() const {
    require(!element_offsets_m.empty(), ErrorCategory::kInvalidConfig,
            "array needs at least one element");
    require(element_offsets_m.front() == 0.0, ErrorCategory::kInvalidConfig,
            "first element offset must be 0");
    for (std::size_t i = 1; i < element_offsets_m.size(); ++i) {
      require(element_offsets_m[i] > element_offsets_m[i - 1],
              ErrorCategory::kInvalidConfig,
              "element offsets must be strictly increasing");
    }
    require(wavelength_m > 0.0, ErrorCategory::kInvalidConfig,
            "wavelength must be positive");
    require(element_cos_exponent >= 0.0, ErrorCategory::kInvalidConfig,
            "element pattern exponent must be >= 0");
    return *this;
  }

  std::size_t size() const { return element_offsets_m.size(); }

  /// Per-element field amplitude toward azimuth az (1 at boresight).
  double element_gain(double az_rad) const {
    if (element_cos_exponent == 0.0) return 1.0;
    const double c = std::cos(az_rad);
    if (c <= 0.0) return 0.0;
    return std::pow(c, element_cos_exponent);
  }
};

/// Wavelength-spaced 3-element Tx preset (offsets 0, lambda, 2*lambda).
///
/// The element exponent is deliberately small: strong envelopes drag the
/// product peak off the commanded angle (the array factor's curvature loses
/// to the envelope slope), while 0.2 leaves commanded lobes in place to well
/// under the pattern grid step yet still separates main from grating lobes,
/// reproducing the observed steering limit at +/-30 degrees.
inline ArrayGeometry awr1843_geometry(double carrier_hz = 77.0e9) {
  ArrayGeometry g;
  g.wavelength_m = kSpeedOfLight / carrier_hz;
  g.element_offsets_m = {0.0, g.wavelength_m, 2.0 * g.wavelength_m};
  g.element_cos_exponent = 0.2;
  return g.validated();
}

/// Per-element phase shifts steering the beam to steer_angle_rad.
/// phases_rad[0] == 0 and all phases are reduced into [0, 2*pi).
/// quantized_steps is empty until quantize_phases() fills it.
struct SteeringVector {
  double steer_angle_rad = 0.0;
  std::vector<double> phases_rad;
  std::vector<int> quantized_steps;

  bool quantized() const { return !quantized_steps.empty(); }

  /// Effective per-element phase: quantized register value when present.
  double effective_phase(std::size_t n) const {
    if (quantized()) {
      return static_cast<double>(quantized_steps[n]) *
             deg2rad(kPhaseShifterStepDeg);
    }
    return phases_rad[n];
  }
};

namespace detail {
inline double wrap_2pi(double phase) {
  double p = std::fmod(phase, 2.0 * M_PI);
  if (p < 0.0) p += 2.0 * M_PI;
  // fmod can return 2*pi after the negative fixup when phase is a tiny
  // negative number
  if (p >= 2.0 * M_PI) p -= 2.0 * M_PI;
  return p;
}
}  // namespace detail

/// phi_n = 2*pi * (d_n / lambda) * sin(theta), reduced mod 2*pi.
inline SteeringVector steering_phases(const ArrayGeometry& geom,
                                      double theta_rad) {
  require(std::abs(theta_rad) < M_PI / 2.0, ErrorCategory::kInvalidArgument,
          "steering angle must satisfy |theta| < 90 degrees");
  SteeringVector sv;
  sv.steer_angle_rad = theta_rad;
  sv.phases_rad.resize(geom.size());
  const double s = std::sin(theta_rad);
  for (std::size_t n = 0; n < geom.size(); ++n) {
    sv.phases_rad[n] =
        detail::wrap_2pi(2.0 * M_PI * geom.element_offsets_m[n] /
                         geom.wavelength_m * s);
  }
  sv.phases_rad[0] = 0.0;
  return sv;
}

/// Maps each phase to the nearest multiple of 5.625 degrees and stores the
/// register word in [0, 63]. Quantization error per element <= 2.8125 deg.
inline SteeringVector quantize_phases(SteeringVector sv) {
  sv.quantized_steps.resize(sv.phases_rad.size());
  const double step = deg2rad(kPhaseShifterStepDeg);
  for (std::size_t n = 0; n < sv.phases_rad.size(); ++n) {
    const long word = std::lround(sv.phases_rad[n] / step);
    sv.quantized_steps[n] =
        static_cast<int>(((word % kPhaseShifterSteps) + kPhaseShifterSteps) %
                         kPhaseShifterSteps);
  }
  return sv;
}

/// Raw transmit field amplitude toward azimuth az for a steering vector:
/// |sum_n exp(j*(2*pi*(d_n/lambda)*sin(az) - phi_n))| / N, weighted by the
/// element pattern. 1.0 means fully coherent boresight transmission; this is
/// the gain scene synthesis applies to departing paths.
inline double field_gain(const ArrayGeometry& geom, const SteeringVector& sv,
                         double az_rad) {
  const double s = std::sin(az_rad);
  std::complex<double> acc(0.0, 0.0);
  for (std::size_t n = 0; n < geom.size(); ++n) {
    const double phase = 2.0 * M_PI * geom.element_offsets_m[n] /
                             geom.wavelength_m * s -
                         sv.effective_phase(n);
    acc += std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return std::abs(acc) / static_cast<double>(geom.size()) *
         geom.element_gain(az_rad);
}

/// Uniform angle grid in radians over [lo, hi] inclusive.
inline std::vector<double> angle_grid(double lo_rad, double hi_rad,
                                      double step_rad) {
  std::vector<double> g;
  const auto count =
      static_cast<std::size_t>(std::floor((hi_rad - lo_rad) / step_rad + 0.5));
  g.reserve(count + 1);
  for (std::size_t i = 0; i <= count; ++i) g.push_back(lo_rad + static_cast<double>(i) * step_rad);
  return g;
}

/// Default 0.5-degree grid over [-90, +90].
inline std::vector<double> default_angle_grid() {
  return angle_grid(deg2rad(-90.0), deg2rad(90.0), deg2rad(0.5));
}

/// Normalized field pattern |E(az)| / |E|_max over the given grid
/// (peak == 1). Uses quantized phases when the vector carries them.
inline std::vector<double> array_pattern(const ArrayGeometry& geom,
                                         const SteeringVector& sv,
                                         const std::vector<double>& angles_rad) {
  require(!angles_rad.empty(), ErrorCategory::kInvalidArgument,
          "array_pattern: empty angle grid");
  std::vector<double> gain(angles_rad.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < angles_rad.size(); ++i) {
    gain[i] = field_gain(geom, sv, angles_rad[i]);
    peak = std::max(peak, gain[i]);
  }
  if (peak > 0.0) {
    for (double& g : gain) g /= peak;
  }
  return gain;
}

/// Scan angles (multiples of step_deg inside the steering domain) whose
/// pattern keeps its global maximum within half a scan step of the
/// commanded angle. Exact main/grating ties (e.g. +/-30 on the wavelength
/// preset) count as usable.
inline std::vector<double> usable_steering_range(const ArrayGeometry& geom,
                                                 double step_deg) {
  require(step_deg > 0.0, ErrorCategory::kInvalidArgument,
          "usable_steering_range: step must be positive");
  const std::vector<double> grid = default_angle_grid();
  std::vector<double> usable;
  const int kmax = static_cast<int>(std::ceil(90.0 / step_deg)) - 1;
  for (int k = -kmax; k <= kmax; ++k) {
    const double theta_deg = static_cast<double>(k) * step_deg;
    const SteeringVector sv =
        quantize_phases(steering_phases(geom, deg2rad(theta_deg)));
    const std::vector<double> pattern = array_pattern(geom, sv, grid);
    double global = 0.0, near_commanded = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      global = std::max(global, pattern[i]);
      if (std::abs(grid[i] - deg2rad(theta_deg)) <=
          deg2rad(step_deg) / 2.0 + 1e-12) {
        near_commanded = std::max(near_commanded, pattern[i]);
      }
    }
    if (near_commanded >= global * (1.0 - 1e-9)) usable.push_back(theta_deg);
  }
  return usable;
}

}  // namespace bmx
