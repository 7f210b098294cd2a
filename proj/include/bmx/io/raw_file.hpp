// bmx/io/raw_file.hpp
//
// BMXF raw capture container: the synthesized complex ADC cubes of one
// gesture plus the radar parameters needed to process them. Layout
// (little-endian, CRC-32 trailer):
//
//   magic "BMXF" | u32 version=1
//   u32 adc_samples | u32 chirps_per_beam | u32 beams | u32 frames
//   f64 bandwidth_hz | f64 slope_hz_per_s | f64 chirp_duration_s
//   f64 carrier_hz | f64 adc_rate_sps | f64 frame_rate_fps
//   i32 label | u32 discarded_paths
//   f32 beam_angle_deg * beams
//   payload: frames x [beam][chirp][sample] of (f32 re, f32 im)
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

#include "bmx/io/binary.hpp"
#include "bmx/scene_sim.hpp"

namespace bmx::io {

inline constexpr char kRawMagic[4] = {'B', 'M', 'X', 'F'};
inline constexpr std::uint32_t kRawVersion = 1;

inline void write_raw_capture(const RawCapture& cap,
                              const std::filesystem::path& path) {
  require(!cap.frames.empty(), ErrorCategory::kInvalidArgument,
          "write_raw_capture: no frames");
  Writer w;
  w.bytes(kRawMagic, 4);
  w.u32(kRawVersion);
  w.u32(static_cast<std::uint32_t>(cap.chirp.adc_samples));
  w.u32(static_cast<std::uint32_t>(cap.frame.chirps_per_beam));
  w.u32(static_cast<std::uint32_t>(cap.frame.beams_per_frame));
  w.u32(static_cast<std::uint32_t>(cap.frames.size()));
  w.f64(cap.chirp.bandwidth_hz);
  w.f64(cap.chirp.slope_hz_per_s);
  w.f64(cap.chirp.chirp_duration_s);
  w.f64(cap.chirp.carrier_hz);
  w.f64(cap.chirp.adc_rate_sps);
  w.f64(cap.frame.frame_rate_fps);
  w.i32(cap.label);
  std::uint32_t discarded = 0;
  for (const auto& fr : cap.frames) {
    discarded += static_cast<std::uint32_t>(fr.discarded_paths);
  }
  w.u32(discarded);
  for (double a : cap.beam_angles_deg) w.f32(static_cast<float>(a));
  for (const auto& fr : cap.frames) {
    require(fr.adc_samples == cap.chirp.adc_samples &&
                fr.chirps_per_beam == cap.frame.chirps_per_beam &&
                fr.beams == cap.frame.beams_per_frame,
            ErrorCategory::kInvalidArgument,
            "write_raw_capture: frame dims inconsistent with config");
    for (const auto& v : fr.data) {
      w.f32(static_cast<float>(v.real()));
      w.f32(static_cast<float>(v.imag()));
    }
  }
  w.save(path);
}

inline RawCapture read_raw_capture(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic(kRawMagic, "raw capture");
  require(r.u32() == kRawVersion, ErrorCategory::kBadFormat,
          "unsupported raw capture version");
  RawCapture cap;
  const std::uint32_t samples = r.u32();
  const std::uint32_t chirps = r.u32();
  const std::uint32_t beams = r.u32();
  const std::uint32_t frames = r.u32();
  cap.chirp.adc_samples = samples;
  cap.chirp.bandwidth_hz = r.f64();
  cap.chirp.slope_hz_per_s = r.f64();
  cap.chirp.chirp_duration_s = r.f64();
  cap.chirp.carrier_hz = r.f64();
  cap.chirp.adc_rate_sps = r.f64();
  cap.frame.frame_rate_fps = r.f64();
  cap.frame.chirps_per_beam = chirps;
  cap.frame.beams_per_frame = beams;
  cap.frame.chirps_per_frame = chirps * beams;
  cap.label = r.i32();
  const std::uint32_t discarded = r.u32();
  cap.beam_angles_deg.resize(beams);
  for (auto& a : cap.beam_angles_deg) a = static_cast<double>(r.f32());
  cap.frames.reserve(frames);
  for (std::uint32_t t = 0; t < frames; ++t) {
    RawFrame fr(samples, chirps, beams);
    for (auto& v : fr.data) {
      const float re = r.f32();
      const float im = r.f32();
      v = {static_cast<double>(re), static_cast<double>(im)};
    }
    if (t == 0) fr.discarded_paths = discarded;  // capture-level diagnostic
    cap.frames.push_back(std::move(fr));
  }
  require(r.at_end(), ErrorCategory::kBadFormat,
          "trailing bytes in raw capture file");
  return cap;
}

}  // namespace bmx::io
