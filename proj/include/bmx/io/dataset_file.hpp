// bmx/io/dataset_file.hpp
//
// BMXD dataset container. Layout (little-endian, CRC-32 trailer over
// everything before it):
//
//   magic "BMXD" | u32 version=1 | u32 dtype=1 (float32)
//   u32 range_bins | u32 doppler_bins | u32 beams | u32 timesteps
//   u32 samples
//   u32 range_start_bin | u32 doppler_center_bin
//   f32 range_bin_m | f32 doppler_bin_mps
//   f32 beam_angle_deg * beams
//   i32 label * samples
//   f32 payload: samples, each [time][beam][range][doppler]
//   u32 crc32

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

#include "bmx/augment.hpp"
#include "bmx/errors.hpp"
#include "bmx/io/binary.hpp"
#include "bmx/tensor.hpp"

namespace bmx::io {

inline constexpr char kDatasetMagic[4] = {'B', 'M', 'X', 'D'};
inline constexpr std::uint32_t kDatasetVersion = 1;
inline constexpr std::uint32_t kDtypeF32 = 1;

inline void write_dataset(const Dataset& ds,
                          const std::filesystem::path& path) {
  // an empty dataset still gets a valid (all-zero-axes) header
  const RdmSequence empty_header;
  const RdmSequence& first =
      ds.samples.empty() ? empty_header : ds.samples.front();
  const auto& t0 = first.tensor;
  for (const auto& s : ds.samples) {
    require(s.tensor.range_bins() == t0.range_bins() &&
                s.tensor.doppler_bins() == t0.doppler_bins() &&
                s.tensor.beams() == t0.beams() &&
                s.tensor.time_steps() == t0.time_steps(),
            ErrorCategory::kInvalidArgument,
            "write_dataset: inhomogeneous sample dimensions");
  }

  Writer w;
  w.bytes(kDatasetMagic, 4);
  w.u32(kDatasetVersion);
  w.u32(kDtypeF32);
  w.u32(static_cast<std::uint32_t>(t0.range_bins()));
  w.u32(static_cast<std::uint32_t>(t0.doppler_bins()));
  w.u32(static_cast<std::uint32_t>(t0.beams()));
  w.u32(static_cast<std::uint32_t>(t0.time_steps()));
  w.u32(static_cast<std::uint32_t>(ds.samples.size()));
  w.u32(static_cast<std::uint32_t>(first.axes.range_start_bin));
  w.u32(static_cast<std::uint32_t>(first.axes.doppler_center_bin));
  w.f32(static_cast<float>(first.axes.range_bin_m));
  w.f32(static_cast<float>(first.axes.doppler_bin_mps));
  for (double a : first.beam_angles_deg) w.f32(static_cast<float>(a));
  for (const auto& s : ds.samples) w.i32(s.label);
  for (const auto& s : ds.samples) {
    for (double v : s.tensor.data()) w.f32(static_cast<float>(v));
  }
  w.save(path);
}

inline Dataset read_dataset(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic(kDatasetMagic, "dataset");
  require(r.u32() == kDatasetVersion, ErrorCategory::kBadFormat,
          "unsupported dataset version");
  require(r.u32() == kDtypeF32, ErrorCategory::kBadFormat,
          "unsupported dataset dtype");
  const std::uint32_t range = r.u32();
  const std::uint32_t doppler = r.u32();
  const std::uint32_t beams = r.u32();
  const std::uint32_t steps = r.u32();
  const std::uint32_t samples = r.u32();
  RdmAxes axes;
  axes.range_start_bin = r.u32();
  axes.doppler_center_bin = r.u32();
  axes.range_bin_m = static_cast<double>(r.f32());
  axes.doppler_bin_mps = static_cast<double>(r.f32());
  std::vector<double> angles(beams);
  for (auto& a : angles) a = static_cast<double>(r.f32());
  std::vector<std::int32_t> labels(samples);
  for (auto& l : labels) l = r.i32();

  Dataset ds;
  for (std::uint32_t i = 0; i < samples; ++i) {
    RdmSequence s;
    s.tensor = Tensor4<double>(range, doppler, beams, steps);
    s.axes = axes;
    s.beam_angles_deg = angles;
    s.label = labels[i];
    for (auto& v : s.tensor.data()) v = static_cast<double>(r.f32());
    ds.push_original(std::move(s));
  }
  require(r.at_end(), ErrorCategory::kBadFormat,
          "trailing bytes in dataset file");
  return ds;
}

}  // namespace bmx::io
