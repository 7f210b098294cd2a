// bmx/gestures.hpp
//
// Stylized hand-rub gesture scripts G1..G6. Each class is an oscillating
// scatterer cluster with its own frequency / amplitude / azimuth-structure
// signature; repetitions jitter every parameter so classes overlap the way
// human executions do. Two classes (G2 and G6) share kinematics and differ
// only by mirrored azimuth offsets, which a boresight beam cannot separate.

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
#include <string>
#include <vector>

#include "bmx/errors.hpp"
#include "bmx/rng.hpp"
#include "bmx/scene_sim.hpp"

namespace bmx {

inline constexpr int kGestureClasses = 6;

/// Scatterer trajectories for one gesture execution: states per time step.
struct GestureScript {
  int label = 0;  // 0-based class id (G1..G6 -> 0..5)
  double duration_s = 4.0;
  std::vector<std::vector<Scatterer>> trajectory;  // [time_step][scatterer]

  GestureScript validated(double min_duration_s = 3.0,
                          double max_duration_s = 6.0) const {
    require(label >= 0 && label < kGestureClasses,
            ErrorCategory::kInvalidArgument, "gesture label out of range");
    require(duration_s >= min_duration_s && duration_s <= max_duration_s,
            ErrorCategory::kInvalidArgument,
            "gesture duration outside allowed interval");
    require(!trajectory.empty(), ErrorCategory::kInvalidArgument,
            "gesture trajectory is empty");
    return *this;
  }

  std::size_t time_steps() const { return trajectory.size(); }
};

inline std::string gesture_name(int label) {
  return "G" + std::to_string(label + 1);
}

namespace detail {

/// Per-class kinematic signature.
struct GestureStyle {
  std::size_t scatterers;
  double osc_hz;          // dominant rub frequency
  double radial_amp_m;    // oscillation amplitude
  double az_offset_deg;   // cluster center relative to subject azimuth
  double az_spread_deg;   // cluster width
  bool counter_phase;     // alternate scatterers in antiphase
  bool static_anchor;     // first scatterer holds still (one-hand rubs)
  double anchor_rcs_dbsm; // RCS of the largest cluster member
};

inline const GestureStyle& gesture_style(int label) {
  // G2 (index 1) and G6 (index 5) are deliberate kinematic twins mirrored
  // in azimuth: the pair a single boresight beam cannot tell apart.
  static const GestureStyle styles[kGestureClasses] = {
      /* G1 palm-to-palm, one hand moving   */ {2, 2.0, 0.030, 0.0, 2.0, false, true, -35.0},
      /* G2 palm over dorsum                */ {3, 1.2, 0.050, +6.0, 2.0, false, false, -35.0},
      /* G3 interlaced fingers, both moving */ {4, 2.5, 0.040, 0.0, 5.0, true, false, -35.0},
      /* G4 fingers-to-palm with forearm    */ {5, 0.8, 0.060, 0.0, 7.0, false, false, -25.0},
      /* G5 thumb rub                       */ {2, 3.0, 0.015, 0.0, 1.5, false, true, -35.0},
      /* G6 rotational rubbing, mirrored    */ {3, 1.2, 0.050, -6.0, 2.0, false, false, -35.0},
  };
  require(label >= 0 && label < kGestureClasses,
          ErrorCategory::kInvalidArgument, "gesture label out of range");
  return styles[label];
}

}  // namespace detail

/// Execution-level variation applied on top of the class signature.
struct GestureJitter {
  double freq_rel = 0.15;      // +/-15% rub frequency
  double amp_rel = 0.20;       // +/-20% amplitude
  double range_abs_m = 0.07;   // whole-cluster range offset
  double az_abs_deg = 2.0;     // whole-cluster azimuth offset
  double duration_min_s = 3.0;
  double duration_max_s = 6.0;
};

/// Builds one seeded execution of gesture `label` performed at
/// (distance_m, orientation_deg), sampled at frame_rate_fps.
inline GestureScript make_gesture_script(int label, double orientation_deg,
                                         double distance_m,
                                         double frame_rate_fps,
                                         std::uint64_t seed,
                                         const GestureJitter& jitter = {}) {
  const detail::GestureStyle& style = detail::gesture_style(label);
  Rng rng(seed);

  GestureScript script;
  script.label = label;
  script.duration_s =
      rng.uniform(jitter.duration_min_s, jitter.duration_max_s);
  const auto steps = static_cast<std::size_t>(
      std::floor(script.duration_s * frame_rate_fps));
  require(steps >= 2, ErrorCategory::kInvalidArgument,
          "frame rate too low to sample the gesture");

  const double freq =
      style.osc_hz * rng.uniform(1.0 - jitter.freq_rel, 1.0 + jitter.freq_rel);
  const double amp =
      style.radial_amp_m * rng.uniform(1.0 - jitter.amp_rel, 1.0 + jitter.amp_rel);
  const double range0 =
      distance_m + rng.uniform(-jitter.range_abs_m, jitter.range_abs_m);
  const double az0_deg = orientation_deg + style.az_offset_deg +
                         rng.uniform(-jitter.az_abs_deg, jitter.az_abs_deg);

  struct Member {
    double range_offset;
    double az_deg;
    double amp;
    double phase;
    double rcs;
  };
  std::vector<Member> members(style.scatterers);
  for (std::size_t i = 0; i < style.scatterers; ++i) {
    Member& m = members[i];
    const double frac = style.scatterers == 1
                            ? 0.0
                            : static_cast<double>(i) /
                                  static_cast<double>(style.scatterers - 1) -
                                  0.5;
    m.range_offset = 0.02 * static_cast<double>(i) +
                     rng.uniform(-0.005, 0.005);
    m.az_deg = az0_deg + frac * style.az_spread_deg;
    m.amp = amp * rng.uniform(0.8, 1.2);
    m.phase = rng.uniform(0.0, 2.0 * M_PI);
    if (style.counter_phase && (i % 2 == 1)) m.phase += M_PI;
    m.rcs = (i == 0 ? style.anchor_rcs_dbsm : -35.0) + rng.uniform(-3.0, 3.0);
    if (style.static_anchor && i == 0) m.amp = 0.0;
  }

  script.trajectory.resize(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    const double time = static_cast<double>(t) / frame_rate_fps;
    auto& frame_scene = script.trajectory[t];
    frame_scene.reserve(members.size());
    for (const Member& m : members) {
      const double arg = 2.0 * M_PI * freq * time + m.phase;
      Scatterer s;
      s.range_m = range0 + m.range_offset + m.amp * std::sin(arg);
      // radial velocity is d(range)/dt, positive receding
      s.radial_velocity_mps = 2.0 * M_PI * freq * m.amp * std::cos(arg);
      s.azimuth_rad = deg2rad(m.az_deg);
      s.rcs_dbsm = m.rcs;
      frame_scene.push_back(s.validated());
    }
  }
  return script;
}

/// Synthesizes the raw capture of a scripted gesture under the given beams.
inline RawCapture capture_gesture(const GestureScript& script,
                                  const ChirpConfig& chirp,
                                  const FrameConfig& frame,
                                  const ArrayGeometry& geom,
                                  const std::vector<double>& beam_angles_deg,
                                  double snr_db, std::uint64_t seed,
                                  const BounceSpec& bounce = {true}) {
  require(beam_angles_deg.size() == frame.beams_per_frame,
          ErrorCategory::kInvalidConfig,
          "beam angle list must match beams_per_frame");
  std::vector<SteeringVector> beams;
  beams.reserve(beam_angles_deg.size());
  for (double a : beam_angles_deg) {
    beams.push_back(quantize_phases(steering_phases(geom, deg2rad(a))));
  }

  RawCapture cap;
  cap.chirp = chirp.validated();
  cap.frame = frame.validated(cap.chirp);
  cap.beam_angles_deg = beam_angles_deg;
  cap.label = script.label;
  cap.frames.reserve(script.time_steps());
  Rng rng(mix_seed(seed, 0xbeef));
  for (std::size_t t = 0; t < script.time_steps(); ++t) {
    std::vector<std::vector<Path>> per_beam(beams.size());
    for (std::size_t b = 0; b < beams.size(); ++b) {
      per_beam[b] = enumerate_paths(script.trajectory[t], beams[b], geom,
                                    bounce);
    }
    cap.frames.push_back(
        synthesize_frame(per_beam, cap.chirp, cap.frame, snr_db, rng));
  }
  return cap;
}

}  // namespace bmx
