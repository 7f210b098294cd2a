// tools/bmx_cli.cpp
//
// Command-line surface: simulate, beampattern, process, augment, train,
// eval, and the study runners. Exit code 0 on success; failures print a
// one-line machine-readable JSON error on stderr and return a category-
// specific nonzero code.

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

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>

#include "bmx/harness/studies.hpp"
#include "bmx/io/checkpoint.hpp"
#include "bmx/io/csv.hpp"
#include "bmx/io/dataset_file.hpp"
#include "bmx/io/raw_file.hpp"
#include "bmx/version.hpp"

namespace fs = std::filesystem;
using bmx::io::json;

namespace {

int exit_code_for(bmx::ErrorCategory c) {
  switch (c) {
    case bmx::ErrorCategory::kInvalidConfig: return 3;
    case bmx::ErrorCategory::kInvalidArgument: return 4;
    case bmx::ErrorCategory::kIoError: return 5;
    case bmx::ErrorCategory::kBadFormat: return 6;
    case bmx::ErrorCategory::kInternal: return 7;
  }
  return 7;
}

struct GlobalOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out_dir = ".";
};

json maybe_config(const GlobalOpts& g) {
  if (g.config_path.empty()) return json::object();
  return bmx::io::load_json_file(g.config_path);
}

fs::path ensure_outdir(const GlobalOpts& g) {
  fs::path dir(g.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  bmx::require(!ec, bmx::ErrorCategory::kIoError,
               "cannot create output directory: " + dir.string());
  return dir;
}

struct RadarSetup {
  bmx::ChirpConfig chirp;
  bmx::FrameConfig frame;
  bmx::ArrayGeometry geom = bmx::awr1843_geometry();
  std::vector<double> beam_angles{-15.0, 0.0, 15.0, 30.0};
  double snr_db = 10.0;
};

RadarSetup radar_from_config(const json& j) {
  RadarSetup r;
  if (j.contains("chirp")) r.chirp = bmx::io::chirp_config_from_json(j["chirp"]);
  if (j.contains("frame")) r.frame = bmx::io::frame_config_from_json(j["frame"]);
  if (j.contains("array")) r.geom = bmx::io::array_geometry_from_json(j["array"]);
  if (j.contains("beam_angles_deg")) {
    r.beam_angles = j["beam_angles_deg"].get<std::vector<double>>();
  }
  if (j.contains("snr_db")) r.snr_db = j["snr_db"].get<double>();
  r.frame.beams_per_frame = r.beam_angles.size();
  r.frame.chirps_per_frame = r.frame.beams_per_frame * r.frame.chirps_per_beam;
  return r;
}

// simulate: scene/gesture script -> BMXF raw capture
int cmd_simulate(const GlobalOpts& g, const std::string& scene_path) {
  const json scene = bmx::io::load_json_file(scene_path);
  RadarSetup radar = radar_from_config(maybe_config(g));
  bmx::GestureScript script =
      bmx::io::gesture_script_from_json(scene, radar.frame.frame_rate_fps);
  std::uint64_t seed = scene.contains("gesture")
                           ? scene["gesture"].value("seed", std::uint64_t{1})
                           : 1;
  if (g.seed_set) seed = g.seed;
  const auto cap =
      bmx::capture_gesture(script, radar.chirp, radar.frame, radar.geom,
                           radar.beam_angles, radar.snr_db, seed,
                           bmx::BounceSpec{scene.value("one_bounce", true)});
  const fs::path out = ensure_outdir(g) / "capture.bmxf";
  bmx::io::write_raw_capture(cap, out);
  std::cout << "wrote " << out.string() << " (" << cap.frames.size()
            << " frames, label " << bmx::gesture_name(cap.label) << ")\n";
  return 0;
}

// beampattern: CSV (angle_deg, normalized_gain) per steering angle
int cmd_beampattern(const GlobalOpts& g, std::vector<double> angles,
                    double grid_step_deg, bool quantized) {
  const json cfg = maybe_config(g);
  bmx::ArrayGeometry geom = cfg.contains("array")
                                ? bmx::io::array_geometry_from_json(cfg["array"])
                                : bmx::awr1843_geometry();
  if (angles.empty()) angles = {-15.0, 0.0, 15.0, 30.0};
  const auto grid = bmx::angle_grid(bmx::deg2rad(-90.0), bmx::deg2rad(90.0),
                                    bmx::deg2rad(grid_step_deg));
  const fs::path dir = ensure_outdir(g);
  for (double a : angles) {
    bmx::SteeringVector sv = bmx::steering_phases(geom, bmx::deg2rad(a));
    if (quantized) sv = bmx::quantize_phases(sv);
    const auto pattern = bmx::array_pattern(geom, sv, grid);
    bmx::io::CsvWriter csv;
    csv.row({"angle_deg", "normalized_gain"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      csv.row({bmx::io::format_double(bmx::rad2deg(grid[i]), 2),
               bmx::io::format_double(pattern[i], 9)});
    }
    const fs::path out =
        dir / ("pattern_" + bmx::io::format_double(a, 1) + ".csv");
    csv.save(out);
    std::cout << "wrote " << out.string() << "\n";
  }
  return 0;
}

// process: BMXF captures -> BMXD dataset
int cmd_process(const GlobalOpts& g, const std::vector<std::string>& inputs,
                double gate_center, double gate_half_width,
                std::size_t target_steps) {
  bmx::require(!inputs.empty(), bmx::ErrorCategory::kInvalidArgument,
               "process: no input captures");
  bmx::Dataset ds;
  for (const auto& path : inputs) {
    const auto cap = bmx::io::read_raw_capture(path);
    ds.push_original(
        bmx::process_capture(cap, gate_center, gate_half_width, target_steps));
  }
  const fs::path out = ensure_outdir(g) / "dataset.bmxd";
  bmx::io::write_dataset(ds, out);
  std::cout << "wrote " << out.string() << " (" << ds.size() << " samples)\n";
  return 0;
}

// augment: BMXD -> BMXD with factor augmented copies appended
int cmd_augment(const GlobalOpts& g, const std::string& input,
                std::size_t factor, double distance_range,
                double velocity_range, double noise_sigma) {
  bmx::Dataset ds = bmx::io::read_dataset(input);
  bmx::AugmentConfig cfg;
  cfg.factor = factor;
  cfg.distance_range_m = distance_range;
  cfg.velocity_range_mps = velocity_range;
  cfg.noise_sigma = noise_sigma;
  const auto out_ds = bmx::augment_dataset(ds, cfg, g.seed_set ? g.seed : 1);
  const fs::path out = ensure_outdir(g) / "augmented.bmxd";
  bmx::io::write_dataset(out_ds, out);
  std::cout << "wrote " << out.string() << " (" << out_ds.size()
            << " samples)\n";
  return 0;
}

// train: BMXD -> BMXC checkpoint + metrics.csv
int cmd_train(const GlobalOpts& g, const std::string& input,
              double val_fraction) {
  const bmx::Dataset ds = bmx::io::read_dataset(input);
  bmx::require(ds.size() >= 5, bmx::ErrorCategory::kInvalidArgument,
               "train: dataset too small");
  const json cfg = maybe_config(g);
  bmx::neural::ModelConfig model =
      cfg.contains("model") ? bmx::io::model_config_from_json(cfg["model"])
                            : bmx::neural::ModelConfig{};
  bmx::neural::TrainConfig tc =
      cfg.contains("train") ? bmx::io::train_config_from_json(cfg["train"])
                            : bmx::neural::TrainConfig{};
  const auto& t0 = ds.samples.front().tensor;
  model.range_bins = t0.range_bins();
  model.doppler_bins = t0.doppler_bins();
  model.beams = t0.beams();
  model.time_steps = t0.time_steps();
  int max_label = 0;
  for (const auto& s : ds.samples) max_label = std::max(max_label, s.label);
  model.classes = std::max<std::size_t>(model.classes,
                                        static_cast<std::size_t>(max_label) + 1);

  const std::uint64_t seed = g.seed_set ? g.seed : 1;
  // deterministic stratified validation split
  const std::size_t val_every = val_fraction > 0.0
                                    ? std::max<std::size_t>(
                                          2, static_cast<std::size_t>(
                                                 1.0 / val_fraction))
                                    : 0;
  bmx::neural::SampleView train_view, val_view;
  if (val_every > 0) {
    const auto fold_of = bmx::harness::assign_folds(ds, val_every,
                                                    bmx::mix_seed(seed, 0x5a));
    for (std::size_t i = 0; i < ds.size(); ++i) {
      (fold_of[i] == 0 ? val_view : train_view).push_back(&ds.samples[i]);
    }
  } else {
    for (const auto& s : ds.samples) train_view.push_back(&s);
  }

  bmx::neural::TrainHistory hist;
  const auto params =
      bmx::neural::train(train_view, val_view, model, tc, seed, &hist);

  const fs::path dir = ensure_outdir(g);
  bmx::io::write_checkpoint(params, dir / "checkpoint.bmxc");
  bmx::io::CsvWriter csv;
  csv.row({"epoch", "train_loss", "val_acc"});
  for (std::size_t e = 0; e < hist.train_loss.size(); ++e) {
    csv.row({std::to_string(e), bmx::io::format_double(hist.train_loss[e]),
             bmx::io::format_double(hist.val_acc[e])});
  }
  csv.save(dir / "metrics.csv");
  std::cout << "wrote " << (dir / "checkpoint.bmxc").string() << " (best epoch "
            << hist.best_epoch << ", val acc "
            << bmx::io::format_double(hist.best_val_acc, 4) << ")\n";
  return 0;
}

// eval: BMXD + BMXC -> per-fold accuracy CSV
int cmd_eval(const GlobalOpts& g, const std::string& input,
             const std::string& checkpoint, std::size_t folds) {
  const bmx::Dataset ds = bmx::io::read_dataset(input);
  const auto params = bmx::io::read_checkpoint(checkpoint);
  bmx::neural::SampleView view;
  for (const auto& s : ds.samples) view.push_back(&s);
  const auto stats = bmx::neural::evaluate(view, params, folds);
  const fs::path dir = ensure_outdir(g);
  bmx::io::CsvWriter csv;
  csv.row({"fold", "accuracy"});
  for (std::size_t f = 0; f < stats.per_fold.size(); ++f) {
    csv.row({std::to_string(f), bmx::io::format_double(stats.per_fold[f])});
  }
  csv.row({"mean", bmx::io::format_double(stats.mean)});
  csv.row({"std", bmx::io::format_double(stats.stddev)});
  csv.save(dir / "eval.csv");
  std::cout << "accuracy " << bmx::io::format_double(stats.mean, 4) << " +/- "
            << bmx::io::format_double(stats.stddev, 4) << " over "
            << stats.per_fold.size() << " folds\n";
  return 0;
}

// study beams|augment|mrc|ablation
int cmd_study(const GlobalOpts& g, const std::string& which) {
  bmx::harness::ExperimentPlan plan;
  if (!g.config_path.empty()) {
    plan = bmx::harness::plan_from_json(bmx::io::load_json_file(g.config_path));
  }
  if (g.seed_set) plan.seed = g.seed;
  const fs::path dir = ensure_outdir(g);
  if (which == "beams") {
    const auto summary = bmx::harness::run_beam_study(plan, dir);
    for (const auto& r : summary.rows) {
      std::cout << bmx::harness::beams_label(r.beams) << ": "
                << bmx::io::format_double(r.stats.mean, 4) << " +/- "
                << bmx::io::format_double(r.stats.stddev, 4) << "\n";
    }
  } else if (which == "augment") {
    const auto summary = bmx::harness::run_augmentation_sweep(plan, dir);
    for (const auto& r : summary.rows) {
      std::cout << "factor " << r.factor << ": "
                << bmx::io::format_double(r.stats.mean, 4) << " +/- "
                << bmx::io::format_double(r.stats.stddev, 4) << "\n";
    }
  } else if (which == "mrc") {
    const auto summary = bmx::harness::run_mrc_comparison(plan, dir);
    std::cout << "fused " << bmx::io::format_double(summary.fused.mean, 4)
              << " vs mrc " << bmx::io::format_double(summary.mrc.mean, 4)
              << " (paired diff "
              << bmx::io::format_double(summary.mean_paired_diff, 4) << ")\n";
  } else if (which == "ablation") {
    const auto summary = bmx::harness::run_ablation(plan, dir);
    for (const auto& r : summary.rows) {
      std::cout << summary.knob << " = " << bmx::io::format_double(r.value, 2)
                << ": " << bmx::io::format_double(r.stats.mean, 4) << " +/- "
                << bmx::io::format_double(r.stats.stddev, 4) << "\n";
    }
  } else {
    throw bmx::Error(bmx::ErrorCategory::kInvalidArgument,
                     "unknown study: " + which +
                         " (expected beams|augment|mrc|ablation)");
  }
  std::cout << "results in " << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BMX: beam-steered mmWave gesture sensing simulator"};
  app.set_version_flag("--version", bmx::kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--config", g.config_path, "JSON configuration file");
  app.add_option("--seed", g.seed, "seed override")
      ->each([&](const std::string&) { g.seed_set = true; });
  app.add_option("--out", g.out_dir, "output directory");

  // simulate
  auto* sim = app.add_subcommand("simulate", "synthesize a gesture capture");
  std::string scene_path;
  sim->add_option("--scene", scene_path, "scene/gesture script (JSON)")
      ->required();

  // beampattern
  auto* bp = app.add_subcommand("beampattern", "far-field pattern CSVs");
  std::vector<double> bp_angles;
  double bp_step = 0.5;
  bool bp_quantized = false;
  bp->add_option("--angles", bp_angles, "steering angles in degrees");
  bp->add_option("--step", bp_step, "pattern grid step in degrees");
  bp->add_flag("--quantized", bp_quantized, "use quantized phase words");

  // process
  auto* proc = app.add_subcommand("process", "raw captures to an RDM dataset");
  std::vector<std::string> proc_in;
  double gate_center = 1.5, gate_half = 0.3;
  std::size_t steps = 0;
  proc->add_option("--in", proc_in, "input .bmxf captures")->required();
  proc->add_option("--gate-center", gate_center, "range gate center (m)");
  proc->add_option("--gate-half-width", gate_half, "range gate half width (m)");
  proc->add_option("--steps", steps, "undersample to this many time steps");

  // augment
  auto* aug = app.add_subcommand("augment", "augment an RDM dataset");
  std::string aug_in;
  std::size_t aug_factor = 15;
  double aug_dist = 0.369, aug_vel = 0.14, aug_sigma = 0.01;
  aug->add_option("--in", aug_in, "input .bmxd dataset")->required();
  aug->add_option("--factor", aug_factor, "augmented copies per original");
  aug->add_option("--distance-range", aug_dist, "range shift bound (m)");
  aug->add_option("--velocity-range", aug_vel, "velocity shift bound (m/s)");
  aug->add_option("--noise-sigma", aug_sigma, "noise mask sigma");

  // train
  auto* tr = app.add_subcommand("train", "train the fusion classifier");
  std::string train_in;
  double val_fraction = 0.2;
  tr->add_option("--in", train_in, "input .bmxd dataset")->required();
  tr->add_option("--val-fraction", val_fraction,
                 "held-out validation fraction");

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint");
  std::string eval_in, eval_ckpt;
  std::size_t eval_folds = 5;
  ev->add_option("--in", eval_in, "input .bmxd dataset")->required();
  ev->add_option("--checkpoint", eval_ckpt, "input .bmxc checkpoint")
      ->required();
  ev->add_option("--folds", eval_folds, "fold count");

  // study
  auto* st = app.add_subcommand("study", "run an experiment study");
  std::string study_kind;
  st->add_option("kind", study_kind, "beams|augment|mrc|ablation")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return cmd_simulate(g, scene_path);
    if (*bp) return cmd_beampattern(g, bp_angles, bp_step, bp_quantized);
    if (*proc) return cmd_process(g, proc_in, gate_center, gate_half, steps);
    if (*aug) {
      return cmd_augment(g, aug_in, aug_factor, aug_dist, aug_vel, aug_sigma);
    }
    if (*tr) return cmd_train(g, train_in, val_fraction);
    if (*ev) return cmd_eval(g, eval_in, eval_ckpt, eval_folds);
    if (*st) return cmd_study(g, study_kind);
  } catch (const bmx::Error& e) {
    std::cerr << bmx::io::json{{"error", bmx::to_string(e.category())},
                               {"message", e.what()}}
                     .dump()
              << "\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << bmx::io::json{{"error", "internal"}, {"message", e.what()}}
                     .dump()
              << "\n";
    return 7;
  }
  return 0;
}
