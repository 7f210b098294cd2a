// bmx/harness/studies.hpp
//
// Experiment runners: beam-combination study, augmentation-factor sweep,
// learned-fusion vs MRC comparison and the ablation runner. Every study
// writes a manifest (the fully-resolved plan + code version) and
// deterministic CSVs; cells run in parallel workers and are individually
// seeded, so scheduling never changes results.

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
#include <filesystem>
#include <functional>
#include <map>
#include <thread>

#include "bmx/harness/dataset_gen.hpp"
#include "bmx/harness/plan.hpp"
#include "bmx/io/csv.hpp"
#include "bmx/neural/train.hpp"
#include "bmx/version.hpp"

namespace bmx::harness {

inline void run_parallel(std::size_t n, std::size_t workers,
                         const std::function<void(std::size_t)>& fn) {
  const std::size_t w = std::max<std::size_t>(1, std::min(workers, n));
  if (w == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < w; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

/// Stratified fold assignment: per class, indices are shuffled under the
/// seed and dealt round-robin, so folds stay label-balanced.
inline std::vector<std::size_t> assign_folds(const Dataset& ds, std::size_t k,
                                             std::uint64_t seed) {
  require(k >= 2, ErrorCategory::kInvalidArgument, "need at least 2 folds");
  std::vector<std::size_t> fold(ds.size(), 0);
  std::map<int, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    by_label[ds.samples[i].label].push_back(i);
  }
  for (auto& [label, idx] : by_label) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(label)));
    rng.shuffle(idx);
    for (std::size_t j = 0; j < idx.size(); ++j) fold[idx[j]] = j % k;
  }
  return fold;
}

inline neural::ModelConfig model_for(const neural::ModelConfig& overrides,
                                     std::size_t classes, const Dataset& data) {
  neural::ModelConfig m = overrides;
  require(!data.samples.empty(), ErrorCategory::kInvalidArgument,
          "model_for: empty dataset");
  const auto& t = data.samples.front().tensor;
  m.range_bins = t.range_bins();
  m.doppler_bins = t.doppler_bins();
  m.beams = t.beams();
  m.time_steps = t.time_steps();
  m.classes = classes;
  return m.validated();
}

struct FoldOutcome {
  double accuracy = 0.0;
  std::size_t best_epoch = 0;
};

/// Trains on every fold but `fold` (optionally with augmented copies of the
/// training samples only) and reports accuracy on the held-out fold. The
/// sample-id audit rejects any augmented sample whose source is not in the
/// training folds.
inline FoldOutcome run_fold(const Dataset& data,
                            const std::vector<std::size_t>& fold_of,
                            std::size_t fold,
                            const neural::ModelConfig& model_cfg,
                            const neural::TrainConfig& train_cfg,
                            std::size_t aug_factor,
                            const AugmentConfig& aug_cfg,
                            std::uint64_t cell_seed) {
  std::vector<std::size_t> train_idx, eval_idx;
  for (std::size_t i = 0; i < data.size(); ++i) {
    (fold_of[i] == fold ? eval_idx : train_idx).push_back(i);
  }
  require(!train_idx.empty() && !eval_idx.empty(),
          ErrorCategory::kInvalidArgument, "run_fold: degenerate fold split");

  // augmented copies of training-fold samples only
  std::vector<RdmSequence> aug_store;
  std::vector<std::size_t> aug_sources;
  if (aug_factor > 0) {
    AugmentConfig cfg = aug_cfg;
    cfg.factor = aug_factor;
    aug_store.reserve(train_idx.size() * aug_factor);
    for (std::size_t i : train_idx) {
      for (std::size_t c = 0; c < aug_factor; ++c) {
        RdmSequence copy = augment_gesture(data.samples[i], cfg,
                                           mix_seed(cell_seed, i, c));
        copy.label = data.samples[i].label;
        aug_store.push_back(std::move(copy));
        aug_sources.push_back(i);
      }
    }
  }

  // sample-id audit: no augmented sample may originate in the eval fold
  for (std::size_t src : aug_sources) {
    require(fold_of[src] != fold, ErrorCategory::kInternal,
            "leak audit: augmented sample sourced from the eval fold");
  }

  neural::SampleView train_view, eval_view;
  for (std::size_t i : train_idx) train_view.push_back(&data.samples[i]);
  for (const auto& s : aug_store) train_view.push_back(&s);
  for (std::size_t i : eval_idx) eval_view.push_back(&data.samples[i]);

  neural::TrainConfig tc = train_cfg;
  tc.threads = 1;  // cells parallelize across, not within
  neural::TrainHistory hist;
  neural::train(train_view, eval_view, model_cfg, tc, cell_seed, &hist);
  FoldOutcome out;
  out.accuracy = hist.best_val_acc;
  out.best_epoch = hist.best_epoch;
  return out;
}

inline void write_manifest(const ExperimentPlan& plan, const std::string& study,
                           const std::filesystem::path& outdir) {
  io::json manifest = plan_to_json(plan);
  manifest["study"] = study;
  manifest["version"] = kVersion;
  io::save_json_file(manifest, outdir / "manifest.json");
}

inline std::string beams_label(const std::vector<double>& beams) {
  std::string s;
  for (std::size_t i = 0; i < beams.size(); ++i) {
    if (i) s += '|';
    s += io::format_double(beams[i], 1);
  }
  return s;
}

// ---------------------------------------------------------------------------
// beam-combination study

struct BeamStudyRow {
  std::vector<double> beams;
  neural::FoldStats stats;
};

struct BeamStudySummary {
  std::vector<BeamStudyRow> rows;

  /// Best mean accuracy among size-n subsets.
  double best_mean(std::size_t subset_size) const {
    double best = -1.0;
    for (const auto& r : rows) {
      if (r.beams.size() == subset_size) best = std::max(best, r.stats.mean);
    }
    return best;
  }
};

inline BeamStudySummary run_beam_study(const ExperimentPlan& plan,
                                       const std::filesystem::path& outdir = {}) {
  plan.validated();
  const Dataset data = generate_dataset(plan);
  const auto fold_of = assign_folds(data, plan.folds,
                                    mix_seed(plan.seed, 0xf01d));

  std::vector<Dataset> sliced;
  sliced.reserve(plan.beam_sets.size());
  for (const auto& set : plan.beam_sets) {
    sliced.push_back(slice_beams(data, beam_indices(plan.scenario, set)));
  }

  struct Cell {
    std::size_t set, fold;
  };
  std::vector<Cell> cells;
  for (std::size_t s = 0; s < plan.beam_sets.size(); ++s) {
    for (std::size_t f = 0; f < plan.folds; ++f) cells.push_back({s, f});
  }
  std::vector<std::vector<double>> acc(plan.beam_sets.size(),
                                       std::vector<double>(plan.folds, 0.0));
  run_parallel(cells.size(), plan.workers, [&](std::size_t i) {
    const Cell& c = cells[i];
    const auto cfg =
        model_for(plan.model, plan.scenario.classes, sliced[c.set]);
    const auto out =
        run_fold(sliced[c.set], fold_of, c.fold, cfg, plan.train, 0,
                 plan.augment, mix_seed(plan.seed, 0xbea0, c.set, c.fold));
    acc[c.set][c.fold] = out.accuracy;
  });

  BeamStudySummary summary;
  for (std::size_t s = 0; s < plan.beam_sets.size(); ++s) {
    summary.rows.push_back({plan.beam_sets[s], neural::fold_stats(acc[s])});
  }

  if (!outdir.empty()) {
    std::filesystem::create_directories(outdir);
    io::CsvWriter csv;
    std::vector<std::string> header{"beams", "n_beams", "mean", "std"};
    for (std::size_t f = 0; f < plan.folds; ++f) {
      header.push_back("fold" + std::to_string(f));
    }
    csv.row(header);
    for (const auto& r : summary.rows) {
      std::vector<std::string> row{beams_label(r.beams),
                                   std::to_string(r.beams.size()),
                                   io::format_double(r.stats.mean),
                                   io::format_double(r.stats.stddev)};
      for (double a : r.stats.per_fold) row.push_back(io::format_double(a));
      csv.row(row);
    }
    csv.save(outdir / "beams.csv");
    write_manifest(plan, "beams", outdir);
  }
  return summary;
}

// ---------------------------------------------------------------------------
// augmentation-factor sweep

struct AugmentStudyRow {
  std::size_t factor;
  neural::FoldStats stats;
};

struct AugmentStudySummary {
  std::vector<AugmentStudyRow> rows;

  double mean_of_factor(std::size_t factor) const {
    for (const auto& r : rows) {
      if (r.factor == factor) return r.stats.mean;
    }
    return -1.0;
  }
};

inline AugmentStudySummary run_augmentation_sweep(
    const ExperimentPlan& plan, const std::filesystem::path& outdir = {}) {
  plan.validated();
  require(!plan.augment_factors.empty(), ErrorCategory::kInvalidConfig,
          "augmentation sweep: empty factor list");
  const Dataset data = generate_dataset(plan);
  const auto fold_of = assign_folds(data, plan.folds,
                                    mix_seed(plan.seed, 0xf01d));
  const auto cfg = model_for(plan.model, plan.scenario.classes, data);

  // factor 0 baseline always present
  std::vector<std::size_t> factors = plan.augment_factors;
  if (std::find(factors.begin(), factors.end(), 0u) == factors.end()) {
    factors.insert(factors.begin(), 0);
  }

  struct Cell {
    std::size_t fi, fold;
  };
  std::vector<Cell> cells;
  for (std::size_t fi = 0; fi < factors.size(); ++fi) {
    for (std::size_t f = 0; f < plan.folds; ++f) cells.push_back({fi, f});
  }
  std::vector<std::vector<double>> acc(factors.size(),
                                       std::vector<double>(plan.folds, 0.0));
  run_parallel(cells.size(), plan.workers, [&](std::size_t i) {
    const Cell& c = cells[i];
    const auto out = run_fold(
        data, fold_of, c.fold, cfg, plan.train, factors[c.fi], plan.augment,
        mix_seed(plan.seed, 0xa069, factors[c.fi], c.fold));
    acc[c.fi][c.fold] = out.accuracy;
  });

  AugmentStudySummary summary;
  for (std::size_t fi = 0; fi < factors.size(); ++fi) {
    summary.rows.push_back({factors[fi], neural::fold_stats(acc[fi])});
  }

  if (!outdir.empty()) {
    std::filesystem::create_directories(outdir);
    io::CsvWriter csv;
    std::vector<std::string> header{"factor", "mean", "std"};
    for (std::size_t f = 0; f < plan.folds; ++f) {
      header.push_back("fold" + std::to_string(f));
    }
    csv.row(header);
    for (const auto& r : summary.rows) {
      std::vector<std::string> row{std::to_string(r.factor),
                                   io::format_double(r.stats.mean),
                                   io::format_double(r.stats.stddev)};
      for (double a : r.stats.per_fold) row.push_back(io::format_double(a));
      csv.row(row);
    }
    csv.save(outdir / "augment.csv");
    write_manifest(plan, "augment", outdir);
  }
  return summary;
}

// ---------------------------------------------------------------------------
// learned fusion vs maximum ratio combining

struct MrcStudySummary {
  neural::FoldStats fused;
  neural::FoldStats mrc;
  double mean_paired_diff = 0.0;  // fused - mrc, averaged over folds
};

inline MrcStudySummary run_mrc_comparison(
    const ExperimentPlan& plan, const std::filesystem::path& outdir = {}) {
  plan.validated();
  require(plan.scenario.beam_angles_deg.size() >= 2,
          ErrorCategory::kInvalidConfig, "MRC comparison needs >= 2 beams");
  Dataset mrc_data;
  const Dataset fused_data = generate_dataset(plan, &mrc_data);
  const auto fold_of = assign_folds(fused_data, plan.folds,
                                    mix_seed(plan.seed, 0xf01d));
  const auto fused_cfg =
      model_for(plan.model, plan.scenario.classes, fused_data);
  const auto mrc_cfg = model_for(plan.model, plan.scenario.classes, mrc_data);

  std::vector<double> fused_acc(plan.folds, 0.0), mrc_acc(plan.folds, 0.0);
  struct Cell {
    bool mrc;
    std::size_t fold;
  };
  std::vector<Cell> cells;
  for (std::size_t f = 0; f < plan.folds; ++f) {
    cells.push_back({false, f});
    cells.push_back({true, f});
  }
  run_parallel(cells.size(), plan.workers, [&](std::size_t i) {
    const Cell& c = cells[i];
    // identical training treatment for both arms, including the seed
    const std::uint64_t seed = mix_seed(plan.seed, 0x39c0, c.fold);
    if (c.mrc) {
      mrc_acc[c.fold] = run_fold(mrc_data, fold_of, c.fold, mrc_cfg,
                                 plan.train, 0, plan.augment, seed)
                            .accuracy;
    } else {
      fused_acc[c.fold] = run_fold(fused_data, fold_of, c.fold, fused_cfg,
                                   plan.train, 0, plan.augment, seed)
                              .accuracy;
    }
  });

  MrcStudySummary summary;
  summary.fused = neural::fold_stats(fused_acc);
  summary.mrc = neural::fold_stats(mrc_acc);
  for (std::size_t f = 0; f < plan.folds; ++f) {
    summary.mean_paired_diff += (fused_acc[f] - mrc_acc[f]);
  }
  summary.mean_paired_diff /= static_cast<double>(plan.folds);

  if (!outdir.empty()) {
    std::filesystem::create_directories(outdir);
    io::CsvWriter csv;
    csv.row({"fold", "fused_accuracy", "mrc_accuracy", "paired_diff"});
    for (std::size_t f = 0; f < plan.folds; ++f) {
      csv.row({std::to_string(f), io::format_double(fused_acc[f]),
               io::format_double(mrc_acc[f]),
               io::format_double(fused_acc[f] - mrc_acc[f])});
    }
    csv.row({"mean", io::format_double(summary.fused.mean),
             io::format_double(summary.mrc.mean),
             io::format_double(summary.mean_paired_diff)});
    csv.save(outdir / "mrc.csv");
    write_manifest(plan, "mrc", outdir);
  }
  return summary;
}

// ---------------------------------------------------------------------------
// ablation runner

inline void apply_knob(neural::ModelConfig& cfg, const std::string& knob,
                       double value) {
  if (knob == "attention_layers") {
    cfg.attention_layers = static_cast<std::size_t>(value);
  } else if (knob == "conv_layers") {
    cfg.conv_layers = static_cast<std::size_t>(value);
  } else if (knob == "lstm_layers") {
    cfg.lstm_layers = static_cast<std::size_t>(value);
  } else if (knob == "dropout") {
    cfg.dropout = value;
  } else {
    throw Error(ErrorCategory::kInvalidConfig,
                "unsupported ablation knob: " + knob);
  }
}

struct AblationRow {
  double value;
  neural::FoldStats stats;
};

struct AblationSummary {
  std::string knob;
  std::vector<AblationRow> rows;
};

inline AblationSummary run_ablation(const ExperimentPlan& plan,
                                    const std::filesystem::path& outdir = {}) {
  plan.validated();
  require(!plan.ablation_values.empty(), ErrorCategory::kInvalidConfig,
          "ablation: empty value list");
  const Dataset data = generate_dataset(plan);
  const auto fold_of = assign_folds(data, plan.folds,
                                    mix_seed(plan.seed, 0xf01d));

  struct Cell {
    std::size_t vi, fold;
  };
  std::vector<Cell> cells;
  for (std::size_t vi = 0; vi < plan.ablation_values.size(); ++vi) {
    for (std::size_t f = 0; f < plan.folds; ++f) cells.push_back({vi, f});
  }
  std::vector<std::vector<double>> acc(plan.ablation_values.size(),
                                       std::vector<double>(plan.folds, 0.0));
  run_parallel(cells.size(), plan.workers, [&](std::size_t i) {
    const Cell& c = cells[i];
    neural::ModelConfig cfg = plan.model;
    apply_knob(cfg, plan.ablation_knob, plan.ablation_values[c.vi]);
    const auto full_cfg = model_for(cfg, plan.scenario.classes, data);
    acc[c.vi][c.fold] =
        run_fold(data, fold_of, c.fold, full_cfg, plan.train, 0, plan.augment,
                 mix_seed(plan.seed, 0xab10, c.vi, c.fold))
            .accuracy;
  });

  AblationSummary summary;
  summary.knob = plan.ablation_knob;
  for (std::size_t vi = 0; vi < plan.ablation_values.size(); ++vi) {
    summary.rows.push_back(
        {plan.ablation_values[vi], neural::fold_stats(acc[vi])});
  }

  if (!outdir.empty()) {
    std::filesystem::create_directories(outdir);
    io::CsvWriter csv;
    std::vector<std::string> header{plan.ablation_knob, "mean", "std"};
    for (std::size_t f = 0; f < plan.folds; ++f) {
      header.push_back("fold" + std::to_string(f));
    }
    csv.row(header);
    for (const auto& r : summary.rows) {
      std::vector<std::string> row{io::format_double(r.value, 2),
                                   io::format_double(r.stats.mean),
                                   io::format_double(r.stats.stddev)};
      for (double a : r.stats.per_fold) row.push_back(io::format_double(a));
      csv.row(row);
    }
    csv.save(outdir / ("ablation_" + plan.ablation_knob + ".csv"));
    write_manifest(plan, "ablation", outdir);
  }
  return summary;
}

}  // namespace bmx::harness
