// bmx/tensor.hpp
//
// Dense 4-D tensor (range x doppler x beams x time) plus the RDM sequence
// types flowing through the processing pipeline.

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

#include <complex>
#include <cstddef>
#include <vector>

#include "bmx/errors.hpp"

namespace bmx {

/// Axis order is fixed as (range, doppler, beam, time); storage is
/// time-major ([t][b][r][d]) so one (t, b) slab is a contiguous
/// range x doppler matrix with doppler fastest.
template <typename T>
class Tensor4 {
 public:
  Tensor4() = default;
  Tensor4(std::size_t range_bins, std::size_t doppler_bins, std::size_t beams,
          std::size_t time_steps, T fill = T{})
      : range_(range_bins),
        doppler_(doppler_bins),
        beams_(beams),
        time_(time_steps),
        data_(range_bins * doppler_bins * beams * time_steps, fill) {}

  std::size_t range_bins() const { return range_; }
  std::size_t doppler_bins() const { return doppler_; }
  std::size_t beams() const { return beams_; }
  std::size_t time_steps() const { return time_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& at(std::size_t r, std::size_t d, std::size_t b, std::size_t t) {
    return data_[index(r, d, b, t)];
  }
  const T& at(std::size_t r, std::size_t d, std::size_t b,
              std::size_t t) const {
    return data_[index(r, d, b, t)];
  }

  /// Pointer to the contiguous range x doppler slab of (t, b).
  T* slab(std::size_t b, std::size_t t) {
    return data_.data() + ((t * beams_ + b) * range_) * doppler_;
  }
  const T* slab(std::size_t b, std::size_t t) const {
    return data_.data() + ((t * beams_ + b) * range_) * doppler_;
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

 private:
  std::size_t index(std::size_t r, std::size_t d, std::size_t b,
                    std::size_t t) const {
    return ((t * beams_ + b) * range_ + r) * doppler_ + d;
  }

  std::size_t range_ = 0, doppler_ = 0, beams_ = 0, time_ = 0;
  std::vector<T> data_;
};

/// Physical axis metadata carried alongside every RDM tensor.
struct RdmAxes {
  double range_bin_m = 0.0;      // meters per range bin
  double doppler_bin_mps = 0.0;  // m/s per doppler bin
  // First retained range bin of the full (ungated) range axis; range of
  // local bin k is (range_start_bin + k) * range_bin_m.
  std::size_t range_start_bin = 0;
  // Doppler axis is fft-shifted: local bin k maps to velocity
  // (k - doppler_center_bin) * doppler_bin_mps.
  std::size_t doppler_center_bin = 0;

  double range_of_bin(std::size_t k) const {
    return static_cast<double>(range_start_bin + k) * range_bin_m;
  }
  double velocity_of_bin(std::size_t k) const {
    return (static_cast<double>(k) - static_cast<double>(doppler_center_bin)) *
           doppler_bin_mps;
  }
};

inline constexpr int kNoLabel = -1;

/// Range Bins x Doppler Bins x Tx Beams x Time Steps, magnitude domain.
struct RdmSequence {
  Tensor4<double> tensor;
  RdmAxes axes;
  std::vector<double> beam_angles_deg;
  int label = kNoLabel;  // gesture class, 0-based; kNoLabel when unlabeled

  void check_consistent() const {
    require(tensor.beams() == beam_angles_deg.size(),
            ErrorCategory::kInvalidArgument,
            "beam count does not match beam angle table");
  }
};

/// Same layout before the magnitude step (complex FFT output).
struct ComplexRdmSequence {
  Tensor4<std::complex<double>> tensor;
  RdmAxes axes;
  std::vector<double> beam_angles_deg;
  int label = kNoLabel;
};

}  // namespace bmx
