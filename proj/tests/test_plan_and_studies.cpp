// tests/test_plan_and_studies.cpp

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

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>

#include "bmx/harness/studies.hpp"
#include "bmx/io/dataset_file.hpp"

namespace fs = std::filesystem;
using bmx::harness::ExperimentPlan;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "bmx_study_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// a deliberately tiny plan so the study plumbing tests run in seconds
ExperimentPlan tiny_plan() {
  ExperimentPlan p;
  p.scenario.classes = 2;
  p.scenario.repetitions = 4;
  p.scenario.orientations_deg = {0.0};
  p.scenario.snr_db = 5.0;
  p.scenario.beam_angles_deg = {0.0, 15.0};
  p.scenario.chirp.adc_samples = 48;
  p.scenario.frame.beams_per_frame = 2;
  p.scenario.frame.chirps_per_beam = 8;
  p.scenario.frame.chirps_per_frame = 16;
  p.scenario.frame.frame_rate_fps = 8.0;
  p.scenario.gate_center_m = 1.5;
  p.scenario.gate_half_width_m = 0.1;  // 5 range bins
  p.scenario.time_steps = 6;
  p.folds = 2;
  p.workers = 2;
  p.model.attention_layers = 1;
  p.model.heads = 2;
  p.model.conv_layers = 1;
  p.model.conv_base_filters = 2;
  p.model.latent_dim = 8;
  p.model.dropout = 0.2;
  p.model.lstm_hidden = 8;
  p.train.lr = 1e-3;
  p.train.max_epochs = 3;
  p.train.patience = 2;
  p.train.batch_size = 8;
  p.beam_sets = {{0.0}, {0.0, 15.0}};
  p.augment_factors = {0, 2};
  p.ablation_values = {0, 1};
  return p;
}

}  // namespace

TEST_CASE("plan validation") {
  SECTION("the default plan is valid") {
    CHECK_NOTHROW(ExperimentPlan{}.validated());
  }
  SECTION("a beam outside the usable steering range is rejected") {
    ExperimentPlan p = tiny_plan();
    p.scenario.beam_angles_deg = {0.0, 45.0};
    CHECK_THROWS_AS(p.validated(), bmx::Error);
  }
  SECTION("a beam set referencing a missing angle is rejected") {
    ExperimentPlan p = tiny_plan();
    p.beam_sets = {{30.0}};
    CHECK_THROWS_AS(p.validated(), bmx::Error);
  }
  SECTION("JSON round trip preserves the resolved plan") {
    const ExperimentPlan p = tiny_plan();
    const auto j = bmx::harness::plan_to_json(p);
    const ExperimentPlan back = bmx::harness::plan_from_json(j);
    CHECK(bmx::harness::plan_to_json(back).dump() == j.dump());
  }
}

TEST_CASE("generate_dataset") {
  SECTION("sample count and labels follow the scenario grid") {
    ExperimentPlan p = tiny_plan();
    p.scenario.orientations_deg = {0.0, 15.0};
    p.scenario.repetitions = 3;
    const auto ds = bmx::harness::generate_dataset(p);
    REQUIRE(ds.size() == 2 * 2 * 3);  // classes x orientations x reps
    std::map<int, std::size_t> counts;
    for (const auto& s : ds.samples) counts[s.label]++;
    CHECK(counts[0] == 6);
    CHECK(counts[1] == 6);
    const auto& t = ds.samples.front().tensor;
    CHECK(t.range_bins() == p.scenario.gated_range_bins());
    CHECK(t.doppler_bins() == p.scenario.frame.chirps_per_beam);
    CHECK(t.beams() == 2);
    CHECK(t.time_steps() == p.scenario.time_steps);
    for (const auto& s : ds.samples) {
      for (double v : s.tensor.data()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
  }

  SECTION("regeneration is byte-identical") {
    const ExperimentPlan p = tiny_plan();
    const auto a = bmx::harness::generate_dataset(p);
    const auto b = bmx::harness::generate_dataset(p);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.samples[i].tensor.data() == b.samples[i].tensor.data());
    }
  }

  SECTION("zero repetitions give an empty dataset with a valid file header") {
    ExperimentPlan p = tiny_plan();
    p.scenario.repetitions = 0;
    const auto ds = bmx::harness::generate_dataset(p);
    CHECK(ds.size() == 0);
    const fs::path out = temp_dir("empty") / "empty.bmxd";
    bmx::io::write_dataset(ds, out);
    CHECK(bmx::io::read_dataset(out).size() == 0);
  }

  SECTION("time_steps 0 unifies to the minimum gesture length") {
    ExperimentPlan p = tiny_plan();
    p.scenario.time_steps = 0;
    p.scenario.repetitions = 3;
    const auto ds = bmx::harness::generate_dataset(p);
    REQUIRE(!ds.samples.empty());
    const std::size_t steps = ds.samples.front().tensor.time_steps();
    CHECK(steps >= 2);
    for (const auto& s : ds.samples) {
      CHECK(s.tensor.time_steps() == steps);
    }
  }
}

TEST_CASE("slice_beams keeps the selected beam contents") {
  const ExperimentPlan p = tiny_plan();
  const auto ds = bmx::harness::generate_dataset(p);
  const auto sliced = bmx::harness::slice_beams(ds, {1});
  REQUIRE(sliced.size() == ds.size());
  CHECK(sliced.samples[0].beam_angles_deg == std::vector<double>{15.0});
  const auto& a = ds.samples[2].tensor;
  const auto& b = sliced.samples[2].tensor;
  for (std::size_t t = 0; t < a.time_steps(); ++t) {
    for (std::size_t r = 0; r < a.range_bins(); ++r) {
      for (std::size_t d = 0; d < a.doppler_bins(); ++d) {
        CHECK(b.at(r, d, 0, t) == a.at(r, d, 1, t));
      }
    }
  }
}

TEST_CASE("assign_folds is stratified and deterministic") {
  const ExperimentPlan p = [&] {
    ExperimentPlan q = tiny_plan();
    q.scenario.repetitions = 10;
    return q;
  }();
  const auto ds = bmx::harness::generate_dataset(p);
  const auto folds = bmx::harness::assign_folds(ds, 5, 42);
  const auto folds2 = bmx::harness::assign_folds(ds, 5, 42);
  CHECK(folds == folds2);
  // per class, fold sizes differ by at most one
  for (int label = 0; label < 2; ++label) {
    std::map<std::size_t, std::size_t> counts;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds.samples[i].label == label) counts[folds[i]]++;
    }
    CHECK(counts.size() == 5);
    for (const auto& [fold, c] : counts) CHECK(c == 2);
  }
}

TEST_CASE("beam study plumbing and manifest determinism") {
  const ExperimentPlan p = tiny_plan();
  const fs::path dir1 = temp_dir("beams1");
  const auto summary = bmx::harness::run_beam_study(p, dir1);
  REQUIRE(summary.rows.size() == 2);
  for (const auto& r : summary.rows) {
    CHECK(r.stats.per_fold.size() == p.folds);
    for (double a : r.stats.per_fold) {
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
    }
  }
  CHECK(fs::exists(dir1 / "beams.csv"));
  CHECK(fs::exists(dir1 / "manifest.json"));

  // rerunning from the manifest reproduces the CSV byte-for-byte
  const auto manifest = bmx::io::load_json_file(dir1 / "manifest.json");
  CHECK(manifest.at("study") == "beams");
  const ExperimentPlan replay = bmx::harness::plan_from_json(manifest);
  const fs::path dir2 = temp_dir("beams2");
  bmx::harness::run_beam_study(replay, dir2);
  CHECK(slurp(dir1 / "beams.csv") == slurp(dir2 / "beams.csv"));
  CHECK(slurp(dir1 / "manifest.json") == slurp(dir2 / "manifest.json"));
}

TEST_CASE("a single-beam subset equals a one-beam model run") {
  // subsetting to one beam yields beam-axis size 1 all the way through
  ExperimentPlan p = tiny_plan();
  p.beam_sets = {{15.0}};
  const auto summary = bmx::harness::run_beam_study(p);
  REQUIRE(summary.rows.size() == 1);
  CHECK(summary.rows[0].beams == std::vector<double>{15.0});
}

TEST_CASE("mrc dataset of identical noiseless beams equals the single beam") {
  ExperimentPlan p = tiny_plan();
  p.scenario.beam_angles_deg = {0.0, 0.0};
  p.scenario.snr_db = bmx::kNoiselessSnrDb;
  bmx::Dataset mrc;
  const auto fused = bmx::harness::generate_dataset(p, &mrc);
  const auto single = bmx::harness::slice_beams(fused, {0});
  REQUIRE(mrc.size() == single.size());
  for (std::size_t i = 0; i < mrc.size(); ++i) {
    CHECK(mrc.samples[i].tensor.data() == single.samples[i].tensor.data());
  }
}

TEST_CASE("mrc study emits paired per-fold rows") {
  const ExperimentPlan p = tiny_plan();
  const fs::path dir = temp_dir("mrc");
  const auto summary = bmx::harness::run_mrc_comparison(p, dir);
  CHECK(summary.fused.per_fold.size() == p.folds);
  CHECK(summary.mrc.per_fold.size() == p.folds);
  const std::string csv = slurp(dir / "mrc.csv");
  // header + one row per fold + mean row
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        static_cast<long>(p.folds) + 2);
}

TEST_CASE("augmentation sweep keeps the factor-0 baseline") {
  ExperimentPlan p = tiny_plan();
  p.augment_factors = {2};  // baseline inserted automatically
  const fs::path dir = temp_dir("sweep");
  const auto summary = bmx::harness::run_augmentation_sweep(p, dir);
  REQUIRE(summary.rows.size() == 2);
  CHECK(summary.rows[0].factor == 0);
  CHECK(summary.rows[1].factor == 2);
  CHECK(fs::exists(dir / "augment.csv"));
  for (const auto& r : summary.rows) {
    for (double a : r.stats.per_fold) {
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
    }
  }
}

TEST_CASE("ablation runner") {
  SECTION("sweeps the requested knob values") {
    ExperimentPlan p = tiny_plan();
    p.ablation_knob = "attention_layers";
    p.ablation_values = {0, 1};
    const fs::path dir = temp_dir("ablation");
    const auto summary = bmx::harness::run_ablation(p, dir);
    REQUIRE(summary.rows.size() == 2);
    CHECK(summary.rows[0].value == 0.0);  // no-attention baseline present
    CHECK(fs::exists(dir / "ablation_attention_layers.csv"));
  }
  SECTION("a single value yields a single row") {
    ExperimentPlan p = tiny_plan();
    p.ablation_values = {1};
    const auto summary = bmx::harness::run_ablation(p);
    CHECK(summary.rows.size() == 1);
  }
  SECTION("applying the current default is a no-op on the config") {
    bmx::neural::ModelConfig cfg = tiny_plan().model;
    bmx::neural::ModelConfig same = cfg;
    bmx::harness::apply_knob(same, "dropout", cfg.dropout);
    CHECK(same.dropout == cfg.dropout);
    bmx::harness::apply_knob(same, "lstm_layers",
                             static_cast<double>(cfg.lstm_layers));
    CHECK(same.lstm_layers == cfg.lstm_layers);
  }
  SECTION("an unknown knob is rejected") {
    bmx::neural::ModelConfig cfg = tiny_plan().model;
    CHECK_THROWS_AS(bmx::harness::apply_knob(cfg, "heads", 4), bmx::Error);
  }
}
