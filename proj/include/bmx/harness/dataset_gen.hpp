// bmx/harness/dataset_gen.hpp
//
// Scripted gesture -> scene synthesis -> RDM pipeline, for every
// (class, orientation, repetition) cell of a scenario. Per-sample seeds are
// derived from the plan seed, so regeneration is byte-exact.

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

#include <atomic>
#include <thread>
#include <vector>

#include "bmx/augment.hpp"
#include "bmx/gestures.hpp"
#include "bmx/harness/plan.hpp"
#include "bmx/rdm_pipeline.hpp"

namespace bmx::harness {

/// One sample processed two ways from the same capture: the multi-beam
/// tensor and its MRC-collapsed counterpart (used by the MRC comparison).
struct SamplePair {
  RdmSequence standard;
  RdmSequence mrc;
};

inline SamplePair generate_sample_pair(const ScenarioConfig& sc, int label,
                                       double orientation_deg,
                                       std::uint64_t sample_seed) {
  const GestureScript script = make_gesture_script(
      label, orientation_deg, sc.distance_m, sc.frame.frame_rate_fps,
      sample_seed, sc.jitter);
  const RawCapture cap = capture_gesture(
      script, sc.chirp, sc.frame, awr1843_geometry(sc.chirp.carrier_hz),
      sc.beam_angles_deg, sc.snr_db, sample_seed, BounceSpec{sc.one_bounce});
  ComplexRdmSequence gated =
      range_gate(range_doppler_fft(cap), sc.gate_center_m,
                 sc.gate_half_width_m);
  const RdmSequence removed = background_remove(gated);

  SamplePair pair;
  pair.standard = normalize(removed);
  if (sc.time_steps > 0 && sc.time_steps < pair.standard.tensor.time_steps()) {
    pair.standard = undersample_time(pair.standard, sc.time_steps);
  }
  RdmSequence combined = normalize(mrc_combine(removed));
  if (sc.time_steps > 0 && sc.time_steps < combined.tensor.time_steps()) {
    combined = undersample_time(combined, sc.time_steps);
  }
  pair.mrc = std::move(combined);
  return pair;
}

/// Deterministic per-sample seed for cell (class, orientation, repetition).
inline std::uint64_t sample_seed(std::uint64_t plan_seed, std::size_t label,
                                 std::size_t orientation_idx,
                                 std::size_t repetition) {
  return mix_seed(mix_seed(plan_seed, 0xda7a), label,
                  orientation_idx, repetition);
}

/// Generates the scenario dataset in (class, orientation, repetition) order.
/// When `mrc_out` is non-null it receives the MRC-collapsed twin of every
/// sample, generated from the same captures.
inline Dataset generate_dataset(const ExperimentPlan& plan,
                                Dataset* mrc_out = nullptr) {
  plan.validated();
  const ScenarioConfig& sc = plan.scenario;
  struct Cell {
    std::size_t g, o, r;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (std::size_t g = 0; g < sc.classes; ++g) {
    for (std::size_t o = 0; o < sc.orientations_deg.size(); ++o) {
      for (std::size_t r = 0; r < sc.repetitions; ++r) {
        cells.push_back({g, o, r, sample_seed(plan.seed, g, o, r)});
      }
    }
  }

  std::vector<SamplePair> pairs(cells.size());
  const std::size_t workers =
      std::max<std::size_t>(1, std::min(plan.workers, cells.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) break;
      const Cell& c = cells[i];
      pairs[i] = generate_sample_pair(sc, static_cast<int>(c.g),
                                      sc.orientations_deg[c.o], c.seed);
      pairs[i].standard.label = static_cast<int>(c.g);
      pairs[i].mrc.label = static_cast<int>(c.g);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  Dataset out;
  for (auto& p : pairs) out.push_original(std::move(p.standard));
  if (mrc_out) {
    for (auto& p : pairs) mrc_out->push_original(std::move(p.mrc));
  }

  // time_steps == 0: unify to the dataset's minimum gesture length
  if (sc.time_steps == 0 && !out.samples.empty()) {
    std::size_t min_steps = out.samples.front().tensor.time_steps();
    for (const auto& s : out.samples) {
      min_steps = std::min(min_steps, s.tensor.time_steps());
    }
    for (auto& s : out.samples) s = undersample_time(s, min_steps);
    if (mrc_out) {
      for (auto& s : mrc_out->samples) s = undersample_time(s, min_steps);
    }
  }
  return out;
}

/// Restricts every sample to the given beam indices (in the given order).
inline Dataset slice_beams(const Dataset& ds,
                           const std::vector<std::size_t>& beam_idx) {
  require(!beam_idx.empty(), ErrorCategory::kInvalidArgument,
          "slice_beams: empty beam selection");
  Dataset out;
  for (const auto& s : ds.samples) {
    RdmSequence sliced;
    sliced.axes = s.axes;
    sliced.label = s.label;
    sliced.tensor = Tensor4<double>(s.tensor.range_bins(),
                                    s.tensor.doppler_bins(), beam_idx.size(),
                                    s.tensor.time_steps());
    for (std::size_t bi = 0; bi < beam_idx.size(); ++bi) {
      require(beam_idx[bi] < s.tensor.beams(), ErrorCategory::kInvalidArgument,
              "slice_beams: beam index out of range");
      sliced.beam_angles_deg.push_back(s.beam_angles_deg[beam_idx[bi]]);
      for (std::size_t t = 0; t < s.tensor.time_steps(); ++t) {
        for (std::size_t r = 0; r < s.tensor.range_bins(); ++r) {
          for (std::size_t d = 0; d < s.tensor.doppler_bins(); ++d) {
            sliced.tensor.at(r, d, bi, t) = s.tensor.at(r, d, beam_idx[bi], t);
          }
        }
      }
    }
    out.push_original(std::move(sliced));
  }
  return out;
}

/// Maps beam angles to indices within the scenario's beam table.
inline std::vector<std::size_t> beam_indices(const ScenarioConfig& sc,
                                             const std::vector<double>& angles) {
  std::vector<std::size_t> idx;
  for (double a : angles) {
    bool found = false;
    for (std::size_t b = 0; b < sc.beam_angles_deg.size(); ++b) {
      if (std::abs(sc.beam_angles_deg[b] - a) < 1e-6) {
        idx.push_back(b);
        found = true;
        break;
      }
    }
    require(found, ErrorCategory::kInvalidArgument,
            "beam angle not present in the scenario: " + std::to_string(a));
  }
  return idx;
}

}  // namespace bmx::harness
