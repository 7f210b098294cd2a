// bmx/rdm_pipeline.hpp
//
// Raw ADC cubes -> normalized RDM sequences. The stage order is fixed:
// range/doppler FFTs, range gate, background removal (complex time-mean
// subtraction followed by magnitude), min-max normalization, time
// undersampling. Also hosts the CFAR noise floor, AoA estimation and the
// maximum-ratio-combining baseline.

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
#include <cstddef>
#include <vector>

#include "bmx/errors.hpp"
#include "bmx/fft.hpp"
#include "bmx/scene_sim.hpp"
#include "bmx/tensor.hpp"
#include "bmx/waveform.hpp"

namespace bmx {

/// Range-FFT over ADC samples per chirp, then Doppler-FFT across chirps per
/// range bin, fft-shifted so velocity 0 sits at bin chirps/2. Unnormalized
/// FFT convention: sum |RDM|^2 == samples * chirps * sum |ADC|^2.
inline ComplexRdmSequence range_doppler_fft(const RawCapture& cap) {
  require(!cap.frames.empty(), ErrorCategory::kInvalidArgument,
          "range_doppler_fft: no frames");
  const std::size_t samples = cap.chirp.adc_samples;
  const std::size_t chirps = cap.frame.chirps_per_beam;
  const std::size_t beams = cap.frame.beams_per_frame;
  require(chirps >= 2, ErrorCategory::kInvalidArgument,
          "range_doppler_fft: need at least 2 chirps per beam");

  ComplexRdmSequence seq;
  seq.tensor = Tensor4<std::complex<double>>(samples, chirps, beams,
                                             cap.frames.size());
  seq.axes.range_bin_m = range_bin_m(cap.chirp);
  seq.axes.doppler_bin_mps = doppler_bin_mps(cap.chirp, chirps);
  seq.axes.range_start_bin = 0;
  seq.axes.doppler_center_bin = fftshift_center(chirps);
  seq.beam_angles_deg = cap.beam_angles_deg;
  seq.label = cap.label;

  std::vector<cdouble> row(samples), col(chirps);
  std::vector<std::vector<cdouble>> range_fft(chirps);
  for (std::size_t t = 0; t < cap.frames.size(); ++t) {
    const RawFrame& fr = cap.frames[t];
    require(fr.adc_samples == samples && fr.chirps_per_beam == chirps &&
                fr.beams == beams,
            ErrorCategory::kInvalidArgument,
            "range_doppler_fft: frame dimensions changed mid-capture");
    for (std::size_t b = 0; b < beams; ++b) {
      for (std::size_t k = 0; k < chirps; ++k) {
        for (std::size_t n = 0; n < samples; ++n) row[n] = fr.at(b, k, n);
        fft_inplace(row);
        range_fft[k] = row;
      }
      for (std::size_t r = 0; r < samples; ++r) {
        for (std::size_t k = 0; k < chirps; ++k) col[k] = range_fft[k][r];
        fft_inplace(col);
        const std::vector<cdouble> shifted = fftshift(col);
        for (std::size_t d = 0; d < chirps; ++d) {
          seq.tensor.at(r, d, b, t) = shifted[d];
        }
      }
    }
  }
  return seq;
}

namespace detail {

template <typename Seq>
Seq range_gate_impl(const Seq& seq, double center_m, double half_width_m) {
  require(half_width_m >= 0.0, ErrorCategory::kInvalidArgument,
          "range_gate: negative half width");
  const double bin = seq.axes.range_bin_m;
  require(bin > 0.0, ErrorCategory::kInvalidArgument,
          "range_gate: missing range bin metadata");
  const double lo_m = center_m - half_width_m;
  const double hi_m = center_m + half_width_m;
  // global bin indices whose center range falls inside [lo, hi]
  const long lo_bin = static_cast<long>(std::ceil(lo_m / bin - 1e-9));
  const long hi_bin = static_cast<long>(std::floor(hi_m / bin + 1e-9));
  const long start = static_cast<long>(seq.axes.range_start_bin);
  const long stop = start + static_cast<long>(seq.tensor.range_bins());
  const long keep_lo = std::max(lo_bin, start);
  const long keep_hi = std::min(hi_bin, stop - 1);
  require(keep_lo <= keep_hi, ErrorCategory::kInvalidArgument,
          "range_gate: gate selects no bins within the measured span");

  Seq out = seq;
  const auto new_bins = static_cast<std::size_t>(keep_hi - keep_lo + 1);
  out.tensor = decltype(seq.tensor)(new_bins, seq.tensor.doppler_bins(),
                                    seq.tensor.beams(), seq.tensor.time_steps());
  out.axes.range_start_bin = static_cast<std::size_t>(keep_lo);
  for (std::size_t t = 0; t < seq.tensor.time_steps(); ++t) {
    for (std::size_t b = 0; b < seq.tensor.beams(); ++b) {
      for (std::size_t r = 0; r < new_bins; ++r) {
        const auto src_r = static_cast<std::size_t>(keep_lo - start) + r;
        for (std::size_t d = 0; d < seq.tensor.doppler_bins(); ++d) {
          out.tensor.at(r, d, b, t) = seq.tensor.at(src_r, d, b, t);
        }
      }
    }
  }
  return out;
}

}  // namespace detail

/// Keeps range bins whose center lies in [center - half_width,
/// center + half_width]; records the new bin offset in the axis metadata.
inline ComplexRdmSequence range_gate(const ComplexRdmSequence& seq,
                                     double center_m, double half_width_m) {
  return detail::range_gate_impl(seq, center_m, half_width_m);
}
inline RdmSequence range_gate(const RdmSequence& seq, double center_m,
                              double half_width_m) {
  return detail::range_gate_impl(seq, center_m, half_width_m);
}

/// Subtracts the per-cell time mean (complex), then takes magnitudes.
/// Static clutter cancels exactly; moving reflections survive.
inline RdmSequence background_remove(const ComplexRdmSequence& seq) {
  const std::size_t steps = seq.tensor.time_steps();
  require(steps >= 2, ErrorCategory::kInvalidArgument,
          "background_remove: need at least 2 time steps");
  RdmSequence out;
  out.tensor = Tensor4<double>(seq.tensor.range_bins(),
                               seq.tensor.doppler_bins(), seq.tensor.beams(),
                               steps);
  out.axes = seq.axes;
  out.beam_angles_deg = seq.beam_angles_deg;
  out.label = seq.label;
  const double inv_steps = 1.0 / static_cast<double>(steps);
  for (std::size_t b = 0; b < seq.tensor.beams(); ++b) {
    for (std::size_t r = 0; r < seq.tensor.range_bins(); ++r) {
      for (std::size_t d = 0; d < seq.tensor.doppler_bins(); ++d) {
        std::complex<double> mean(0.0, 0.0);
        for (std::size_t t = 0; t < steps; ++t) mean += seq.tensor.at(r, d, b, t);
        mean *= inv_steps;
        for (std::size_t t = 0; t < steps; ++t) {
          out.tensor.at(r, d, b, t) = std::abs(seq.tensor.at(r, d, b, t) - mean);
        }
      }
    }
  }
  return out;
}

/// Min-max normalization over the whole gesture tensor into [0, 1];
/// a degenerate all-equal tensor maps to all zeros.
inline RdmSequence normalize(const RdmSequence& seq) {
  require(!seq.tensor.empty(), ErrorCategory::kInvalidArgument,
          "normalize: empty tensor");
  RdmSequence out = seq;
  const auto& v = seq.tensor.data();
  const auto [mn_it, mx_it] = std::minmax_element(v.begin(), v.end());
  const double mn = *mn_it, mx = *mx_it;
  auto& o = out.tensor.data();
  if (mx > mn) {
    // direct division so the extremes map to exactly 0 and 1 (idempotence)
    const double span = mx - mn;
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = (v[i] - mn) / span;
  } else {
    std::fill(o.begin(), o.end(), 0.0);
  }
  return out;
}

/// Uniformly spaced deterministic frame selection down to target_steps.
/// Index i maps to nearbyint(i * (T-1) / (target-1)).
inline RdmSequence undersample_time(const RdmSequence& seq,
                                    std::size_t target_steps) {
  const std::size_t steps = seq.tensor.time_steps();
  require(target_steps >= 1, ErrorCategory::kInvalidArgument,
          "undersample_time: target must be >= 1");
  require(target_steps <= steps, ErrorCategory::kInvalidArgument,
          "undersample_time: target exceeds current steps");
  if (target_steps == steps) return seq;
  RdmSequence out = seq;
  out.tensor = Tensor4<double>(seq.tensor.range_bins(),
                               seq.tensor.doppler_bins(), seq.tensor.beams(),
                               target_steps);
  for (std::size_t i = 0; i < target_steps; ++i) {
    std::size_t src;
    if (target_steps == 1) {
      src = 0;
    } else {
      src = static_cast<std::size_t>(std::nearbyint(
          static_cast<double>(i) * static_cast<double>(steps - 1) /
          static_cast<double>(target_steps - 1)));
    }
    for (std::size_t b = 0; b < seq.tensor.beams(); ++b) {
      for (std::size_t r = 0; r < seq.tensor.range_bins(); ++r) {
        for (std::size_t d = 0; d < seq.tensor.doppler_bins(); ++d) {
          out.tensor.at(r, d, b, i) = seq.tensor.at(r, d, b, src);
        }
      }
    }
  }
  return out;
}

/// Full fixed-order pipeline used by dataset generation and the `process`
/// subcommand: FFTs -> range gate -> background removal -> normalize ->
/// undersample.
inline RdmSequence process_capture(const RawCapture& cap, double gate_center_m,
                                   double gate_half_width_m,
                                   std::size_t target_steps) {
  ComplexRdmSequence c = range_doppler_fft(cap);
  c = range_gate(c, gate_center_m, gate_half_width_m);
  RdmSequence r = background_remove(c);
  r = normalize(r);
  if (target_steps > 0 && target_steps < r.tensor.time_steps()) {
    r = undersample_time(r, target_steps);
  }
  return r;
}

// ---------------------------------------------------------------------------
// CFAR-CA noise floor

struct CfarConfig {
  std::size_t train_cells = 8;  // per side
  std::size_t guard_cells = 2;  // per side
  double threshold_factor = 0.0;  // alpha; 0 derives it from pfa
  double pfa = 1e-3;

  /// alpha = N * (pfa^(-1/N) - 1) for N training cells (exponential noise).
  double alpha() const {
    if (threshold_factor > 0.0) return threshold_factor;
    const double n = static_cast<double>(2 * train_cells);
    return n * (std::pow(pfa, -1.0 / n) - 1.0);
  }
};

struct CfarResult {
  std::vector<double> floor;     // alpha-scaled per-bin threshold base
  std::vector<bool> detections;  // cell > alpha * floor
};

/// Cell-averaging CFAR on a power-domain profile. Training windows are
/// clipped at the profile edges.
inline CfarResult cfar_ca_floor(const std::vector<double>& power_profile,
                                const CfarConfig& cfg = {}) {
  const std::size_t n = power_profile.size();
  require(n > 2 * (cfg.train_cells + cfg.guard_cells),
          ErrorCategory::kInvalidArgument,
          "cfar_ca_floor: profile shorter than the CFAR window");
  const double alpha = cfg.alpha();
  CfarResult res;
  res.floor.resize(n, 0.0);
  res.detections.resize(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    std::size_t count = 0;
    const long lo_end = static_cast<long>(i) - static_cast<long>(cfg.guard_cells);
    for (long j = lo_end - static_cast<long>(cfg.train_cells); j < lo_end; ++j) {
      if (j >= 0) {
        acc += power_profile[static_cast<std::size_t>(j)];
        ++count;
      }
    }
    const long hi_begin = static_cast<long>(i) + static_cast<long>(cfg.guard_cells) + 1;
    for (long j = hi_begin; j < hi_begin + static_cast<long>(cfg.train_cells); ++j) {
      if (j < static_cast<long>(n)) {
        acc += power_profile[static_cast<std::size_t>(j)];
        ++count;
      }
    }
    const double mean = count > 0 ? acc / static_cast<double>(count) : 0.0;
    res.floor[i] = mean;
    res.detections[i] = power_profile[i] > alpha * mean;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Angle of arrival

/// Azimuth from the phase progression across Rx channels:
/// theta = asin(dphi * lambda / (2 * pi * d_rx)), with dphi averaged over
/// adjacent channel products.
inline double aoa_estimate(const std::vector<std::complex<double>>& channels,
                           double rx_spacing_m, double wavelength_m) {
  require(channels.size() >= 2, ErrorCategory::kInvalidArgument,
          "aoa_estimate: need at least 2 Rx channels");
  require(rx_spacing_m > 0.0 && wavelength_m > 0.0,
          ErrorCategory::kInvalidArgument, "aoa_estimate: bad geometry");
  std::complex<double> acc(0.0, 0.0);
  for (std::size_t i = 0; i + 1 < channels.size(); ++i) {
    acc += channels[i + 1] * std::conj(channels[i]);
  }
  const double dphi = std::arg(acc);
  const double u = dphi * wavelength_m / (2.0 * M_PI * rx_spacing_m);
  require(std::abs(u) <= 1.0, ErrorCategory::kInvalidArgument,
          "aoa_estimate: phase progression outside the visible region");
  return std::asin(u);
}

// ---------------------------------------------------------------------------
// Maximum ratio combining

/// Collapses the beam axis into one weighted sum; weights are proportional
/// to each beam's per-gesture signal power and sum to 1. The output beam
/// angle is the weight-averaged angle of its inputs.
inline RdmSequence mrc_combine(const RdmSequence& seq) {
  const std::size_t beams = seq.tensor.beams();
  require(beams >= 2, ErrorCategory::kInvalidArgument,
          "mrc_combine: need at least 2 beams");
  seq.check_consistent();
  std::vector<double> power(beams, 0.0);
  for (std::size_t b = 0; b < beams; ++b) {
    for (std::size_t t = 0; t < seq.tensor.time_steps(); ++t) {
      const double* slab = seq.tensor.slab(b, t);
      const std::size_t cells =
          seq.tensor.range_bins() * seq.tensor.doppler_bins();
      for (std::size_t i = 0; i < cells; ++i) power[b] += slab[i] * slab[i];
    }
  }
  double total = 0.0;
  for (double p : power) total += p;
  std::vector<double> w(beams, 1.0 / static_cast<double>(beams));
  if (total > 0.0) {
    for (std::size_t b = 0; b < beams; ++b) w[b] = power[b] / total;
  }

  RdmSequence out;
  out.tensor = Tensor4<double>(seq.tensor.range_bins(),
                               seq.tensor.doppler_bins(), 1,
                               seq.tensor.time_steps());
  out.axes = seq.axes;
  out.label = seq.label;
  double angle = 0.0;
  for (std::size_t b = 0; b < beams; ++b) angle += w[b] * seq.beam_angles_deg[b];
  out.beam_angles_deg = {angle};
  for (std::size_t t = 0; t < seq.tensor.time_steps(); ++t) {
    for (std::size_t r = 0; r < seq.tensor.range_bins(); ++r) {
      for (std::size_t d = 0; d < seq.tensor.doppler_bins(); ++d) {
        double acc = 0.0;
        for (std::size_t b = 0; b < beams; ++b) {
          acc += w[b] * seq.tensor.at(r, d, b, t);
        }
        out.tensor.at(r, d, 0, t) = acc;
      }
    }
  }
  return out;
}

/// Argmax (range, doppler) cell of one (beam, time) slab; test helper and
/// detection utility.
inline std::pair<std::size_t, std::size_t> argmax_cell(
    const Tensor4<double>& tensor, std::size_t beam, std::size_t t) {
  std::size_t best_r = 0, best_d = 0;
  double best = -1.0;
  for (std::size_t r = 0; r < tensor.range_bins(); ++r) {
    for (std::size_t d = 0; d < tensor.doppler_bins(); ++d) {
      const double v = tensor.at(r, d, beam, t);
      if (v > best) {
        best = v;
        best_r = r;
        best_d = d;
      }
    }
  }
  return {best_r, best_d};
}

inline std::pair<std::size_t, std::size_t> argmax_cell_complex(
    const Tensor4<std::complex<double>>& tensor, std::size_t beam,
    std::size_t t) {
  std::size_t best_r = 0, best_d = 0;
  double best = -1.0;
  for (std::size_t r = 0; r < tensor.range_bins(); ++r) {
    for (std::size_t d = 0; d < tensor.doppler_bins(); ++d) {
      const double v = std::abs(tensor.at(r, d, beam, t));
      if (v > best) {
        best = v;
        best_r = r;
        best_d = d;
      }
    }
  }
  return {best_r, best_d};
}

}  // namespace bmx
