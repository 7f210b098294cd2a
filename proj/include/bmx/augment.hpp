// bmx/augment.hpp
//
// Channel-model data augmentation for RDM sequences: one random range shift
// and one random Doppler shift per gesture (applied to every beam and time
// step), plus a per-cell Gaussian noise mask, clamped back into [0, 1].

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
#include <vector>

#include "bmx/errors.hpp"
#include "bmx/rng.hpp"
#include "bmx/tensor.hpp"

namespace bmx {

struct AugmentConfig {
  double distance_range_m = 0.369;   // draw b from [-range, +range]
  double velocity_range_mps = 0.14;  // draw a from [-range, +range]
  double noise_sigma = 0.01;
  std::size_t factor = 15;  // augmented copies per original

  AugmentConfig validated() const {
    require(distance_range_m >= 0.0 && velocity_range_mps >= 0.0,
            ErrorCategory::kInvalidConfig,
            "augment ranges must be symmetric about 0 (nonnegative bounds)");
    require(noise_sigma >= 0.0, ErrorCategory::kInvalidConfig,
            "noise sigma must be >= 0");
    return *this;
  }
};

namespace detail {

/// In-place shift of the range (axis 0) and doppler (axis 1) indices by the
/// given signed bin counts. Vacated cells are zero-filled; shifted-out cells
/// are dropped (no wraparound).
inline void shift_bins(Tensor4<double>& t, long range_shift,
                       long doppler_shift) {
  const long R = static_cast<long>(t.range_bins());
  const long D = static_cast<long>(t.doppler_bins());
  require(std::labs(range_shift) < R, ErrorCategory::kInvalidArgument,
          "augment: range shift magnitude reaches the axis length");
  require(std::labs(doppler_shift) < D, ErrorCategory::kInvalidArgument,
          "augment: doppler shift magnitude reaches the axis length");
  if (range_shift == 0 && doppler_shift == 0) return;
  Tensor4<double> out(t.range_bins(), t.doppler_bins(), t.beams(),
                      t.time_steps(), 0.0);
  for (std::size_t tt = 0; tt < t.time_steps(); ++tt) {
    for (std::size_t b = 0; b < t.beams(); ++b) {
      for (long r = 0; r < R; ++r) {
        const long src_r = r - range_shift;
        if (src_r < 0 || src_r >= R) continue;
        for (long d = 0; d < D; ++d) {
          const long src_d = d - doppler_shift;
          if (src_d < 0 || src_d >= D) continue;
          out.at(static_cast<std::size_t>(r), static_cast<std::size_t>(d), b,
                 tt) = t.at(static_cast<std::size_t>(src_r),
                            static_cast<std::size_t>(src_d), b, tt);
        }
      }
    }
  }
  t = std::move(out);
}

}  // namespace detail

/// Signed bin shifts for physical draws (a, b); exposed for tests.
inline long velocity_to_bins(double a_mps, const RdmAxes& axes) {
  require(axes.doppler_bin_mps > 0.0, ErrorCategory::kInvalidArgument,
          "augment: missing doppler bin metadata");
  return std::lround(a_mps / axes.doppler_bin_mps);
}
inline long distance_to_bins(double b_m, const RdmAxes& axes) {
  require(axes.range_bin_m > 0.0, ErrorCategory::kInvalidArgument,
          "augment: missing range bin metadata");
  return std::lround(b_m / axes.range_bin_m);
}

/// One augmented copy: draw velocity a and distance b once for the gesture,
/// shift all beams/time steps by the rounded bin counts, add N(0, sigma^2)
/// noise per cell and clamp into [0, 1].
inline RdmSequence augment_gesture(const RdmSequence& seq,
                                   const AugmentConfig& cfg,
                                   std::uint64_t seed) {
  cfg.validated();
  require(!seq.tensor.empty(), ErrorCategory::kInvalidArgument,
          "augment_gesture: empty sequence");
  Rng rng(seed);
  const double a =
      rng.uniform(-cfg.velocity_range_mps, cfg.velocity_range_mps);
  const double b = rng.uniform(-cfg.distance_range_m, cfg.distance_range_m);

  RdmSequence out = seq;
  detail::shift_bins(out.tensor, distance_to_bins(b, seq.axes),
                     velocity_to_bins(a, seq.axes));
  if (cfg.noise_sigma > 0.0) {
    for (double& v : out.tensor.data()) {
      v = std::clamp(v + rng.normal(0.0, cfg.noise_sigma), 0.0, 1.0);
    }
  }
  return out;
}

/// Deterministic variant for tests: explicit (a, b) draws, optional noise.
inline RdmSequence augment_gesture_fixed(const RdmSequence& seq, double a_mps,
                                         double b_m, double noise_sigma,
                                         std::uint64_t seed) {
  RdmSequence out = seq;
  detail::shift_bins(out.tensor, distance_to_bins(b_m, seq.axes),
                     velocity_to_bins(a_mps, seq.axes));
  if (noise_sigma > 0.0) {
    Rng rng(seed);
    for (double& v : out.tensor.data()) {
      v = std::clamp(v + rng.normal(0.0, noise_sigma), 0.0, 1.0);
    }
  }
  return out;
}

/// Labeled sample set with provenance for train/eval leak audits.
/// source_index[i] == i for originals; augmented samples point back at the
/// sample they were derived from.
struct Dataset {
  std::vector<RdmSequence> samples;
  std::vector<std::size_t> source_index;

  std::size_t size() const { return samples.size(); }

  void push_original(RdmSequence seq) {
    source_index.push_back(samples.size());
    samples.push_back(std::move(seq));
  }
  void push_augmented(RdmSequence seq, std::size_t source) {
    source_index.push_back(source);
    samples.push_back(std::move(seq));
  }
  bool is_original(std::size_t i) const { return source_index[i] == i; }
};

/// Originals plus cfg.factor augmented copies of each; labels preserved,
/// per-copy RNG streams split from the master seed by (gesture, copy).
inline Dataset augment_dataset(const Dataset& in, const AugmentConfig& cfg,
                               std::uint64_t seed) {
  cfg.validated();
  Dataset out;
  out.samples.reserve(in.size() * (cfg.factor + 1));
  for (std::size_t i = 0; i < in.size(); ++i) {
    out.push_original(in.samples[i]);
  }
  for (std::size_t i = 0; i < in.size(); ++i) {
    for (std::size_t c = 0; c < cfg.factor; ++c) {
      RdmSequence copy =
          augment_gesture(in.samples[i], cfg, mix_seed(seed, i, c));
      copy.label = in.samples[i].label;
      out.push_augmented(std::move(copy), i);
    }
  }
  return out;
}

}  // namespace bmx
