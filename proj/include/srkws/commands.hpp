// include/srkws/commands.hpp

// Copyright 2026 The srkws Authors
//
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

#ifndef SRKWS_COMMANDS_HPP_
#define SRKWS_COMMANDS_HPP_

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include "srkws/checkpoint.hpp"
#include "srkws/config.hpp"
#include "srkws/data.hpp"
#include "srkws/evaluate.hpp"
#include "srkws/feature_set.hpp"
#include "srkws/loss.hpp"
#include "srkws/stream.hpp"
#include "srkws/train.hpp"
#include "srkws/wav.hpp"

namespace srkws {

namespace fs = std::filesystem;

namespace detail {

inline void make_dirs(const fs::path &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    fail(ErrorCode::kIo, "cannot create directory ", dir.string(), ": ", ec.message());
}

inline std::ofstream open_out(const fs::path &path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) fail(ErrorCode::kIo, "cannot write ", path.string());
  return os;
}

inline void close_out(std::ofstream &os, const fs::path &path) {
  os.close();
  if (!os) fail(ErrorCode::kIo, "short write to ", path.string());
}

/// Report directories are named after the command, head kind and seed so
/// that runs which differ in any of these sit side by side.
inline fs::path run_dir(const fs::path &root, const std::string &command, HeadKind head,
                        std::uint64_t seed) {
  return root / (command + "-" + std::string(head_kind_name(head)) + "-s" + std::to_string(seed));
}

inline std::string clip_name(const HierLabel &l, std::size_t item) {
  char buf[64];
  if (l.is_keyword())
    std::snprintf(buf, sizeof buf, "keyword%zu_%05zu.wav", *l.c, item);
  else
    std::snprintf(buf, sizeof buf, "%s_%05zu.wav", l.s ? "speech" : "noise", item);
  return buf;
}

inline std::vector<ManifestEntry> write_corpus(const SynthConfig &cfg, const fs::path &root,
                                               const std::string &subdir, std::size_t threads) {
  make_dirs(root / subdir);
  const std::vector<HierLabel> labels = synth_labels(cfg);
  std::vector<ManifestEntry> entries(labels.size());
  parallel_for(labels.size(), threads, [&](std::size_t i) {
    const std::size_t item = i % cfg.samples_per_class;
    const std::string rel = subdir + "/" + clip_name(labels[i], item);
    write_wav(root / rel, synth_clip(cfg, labels[i], item).audio);
    entries[i] = {rel, labels[i]};
  });
  return entries;
}

/// Rewrites manifest entries so that they resolve from `dir`.
inline std::vector<ManifestEntry> rebase_entries(const fs::path &manifest,
                                                 std::span<const ManifestEntry> entries,
                                                 const fs::path &dir) {
  const fs::path base = fs::absolute(dir).lexically_normal();
  std::vector<ManifestEntry> out;
  for (const auto &e : entries) {
    const fs::path abs = fs::absolute(resolve_entry_path(manifest, e)).lexically_normal();
    out.push_back({abs.lexically_relative(base).generic_string(), e.label});
  }
  return out;
}

inline std::string percent(const std::optional<double> &v) {
  if (!v) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * *v);
  return buf;
}

inline void print_metrics_table(std::ostream &out, std::span<const MetricsRow> rows) {
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %9s %9s %8s %8s %9s\n", "model", "acc(%)", "F1(%)",
                "FA(%)", "FA_ood(%)", "params");
  out << line;
  for (const auto &r : rows) {
    std::snprintf(line, sizeof line, "%-10s %9s %9s %8s %8s %9zu\n", r.model_kind.c_str(),
                  percent(r.accuracy).c_str(), percent(r.weighted_f1).c_str(), percent(r.fa).c_str(),
                  percent(r.fa_ood).c_str(), r.n_params);
    out << line;
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// synth

struct SynthResult {
  fs::path manifest;
  std::optional<fs::path> ood_manifest;
  std::size_t n_files = 0;
};

/// Writes `wav/*.wav` and `manifest.jsonl` under `out`; with
/// synth.ood_samples_per_class > 0 also `ood/*.wav` and `ood_manifest.jsonl`.
inline SynthResult cmd_synth(RunConfig cfg, const fs::path &out, std::ostream &log) {
  cfg.sync();
  cfg.validate();
  detail::make_dirs(out);
  SynthResult r;
  auto entries = detail::write_corpus(cfg.synth, out, "wav", cfg.threads);
  r.manifest = out / "manifest.jsonl";
  save_manifest(r.manifest, entries);
  r.n_files = entries.size();
  if (cfg.ood_samples_per_class > 0) {
    SynthConfig ood = cfg.synth;
    ood.out_of_domain = true;
    ood.samples_per_class = cfg.ood_samples_per_class;
    auto ood_entries = detail::write_corpus(ood, out, "ood", cfg.threads);
    r.ood_manifest = out / "ood_manifest.jsonl";
    save_manifest(*r.ood_manifest, ood_entries);
    r.n_files += ood_entries.size();
  }
  log << "wrote " << r.n_files << " clips to " << out.string() << '\n';
  return r;
}

// ---------------------------------------------------------------------------
// train

struct TrainCommandResult {
  fs::path dir;
  fs::path checkpoint;
  std::size_t best_epoch = 0;
  MetricsReport validation;
};

/// Splits the manifest 8:1:1, trains one head and writes `checkpoint.json`,
/// `train_log.csv`, `config.txt` and the three split manifests.
inline TrainCommandResult cmd_train(RunConfig cfg, const fs::path &manifest, const fs::path &out_root,
                                    std::ostream &log) {
  cfg.sync();
  cfg.validate();
  const std::size_t N = cfg.model.n_keywords;
  const auto entries = load_manifest(manifest, N);
  const DatasetSplit split = split_dataset(entries, cfg.seed);

  TrainCommandResult r;
  r.dir = detail::run_dir(out_root, "train", cfg.model.head, cfg.seed);
  detail::make_dirs(r.dir);
  save_manifest(r.dir / "train.jsonl", detail::rebase_entries(manifest, split.train, r.dir));
  save_manifest(r.dir / "validation.jsonl", detail::rebase_entries(manifest, split.validation, r.dir));
  save_manifest(r.dir / "test.jsonl", detail::rebase_entries(manifest, split.test, r.dir));

  const FeatureSet train_set = features_from_manifest(manifest, split.train, cfg.features, cfg.threads);
  const FeatureSet val_set = features_from_manifest(manifest, split.validation, cfg.features, cfg.threads);
  ModelConfig mc = cfg.model;
  mc.frames = train_set.maps.front().frames;
  std::tie(mc.input_mean, mc.input_std) = feature_stats(train_set.maps);

  LossConfig loss = cfg.auto_class_weights
                        ? loss_config_from_labels(train_set.labels, N, cfg.lambda1, cfg.lambda2, cfg.gamma)
                        : LossConfig::uniform(N);
  loss.lambda1 = cfg.lambda1;
  loss.lambda2 = cfg.lambda2;
  loss.gamma = cfg.gamma;

  TrainOptions opts;
  opts.batch_size = cfg.batch_size;
  opts.seed = cfg.seed;
  opts.selection_accuracy_margin = cfg.selection_margin;
  auto result = train<float>(mc, train_set, val_set, loss, cfg.schedule, opts, [&log](const EpochLog &e) {
    char line[160];
    std::snprintf(line, sizeof line, "epoch %3zu  loss %.5f  val_loss %.5f  val_acc %.4f  val_FA %.4f\n",
                  e.epoch, e.train_loss, e.val_loss, e.val_accuracy, e.val_fa);
    log << line;
  });

  r.checkpoint = r.dir / "checkpoint.json";
  save_checkpoint(r.checkpoint, result.params, mc);
  {
    const fs::path p = r.dir / "train_log.csv";
    auto os = detail::open_out(p);
    write_training_log(os, result.log);
    detail::close_out(os, p);
  }
  {
    const fs::path p = r.dir / "config.txt";
    auto os = detail::open_out(p);
    write_config(os, cfg);
    detail::close_out(os, p);
  }
  r.best_epoch = result.best_epoch;
  r.validation = evaluate_model(result.params, mc, val_set).metrics;
  log << "selected epoch " << r.best_epoch << ": validation accuracy "
      << detail::percent(r.validation.accuracy) << "%, F1 " << detail::percent(r.validation.weighted_f1)
      << "%, FA " << detail::percent(r.validation.fa) << "%\n"
      << "checkpoint " << r.checkpoint.string() << '\n';
  return r;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  std::optional<fs::path> compare_checkpoint;  // second model, reported alongside
  std::optional<fs::path> ood_manifest;        // negatives only
  bool embeddings = false;                     // dump branch activations (SR only)
};

struct EvalCommandResult {
  fs::path dir;
  std::vector<MetricsRow> rows;
  int exit_code = 0;  // nonzero when FA is undefined
};

/// Writes `metrics.csv` and `ks.csv` (plus `embeddings.csv` on request) and
/// prints a summary table. Without negatives in the manifest FA is reported
/// as NA, the other metrics are still written, and the exit code is 1.
inline EvalCommandResult cmd_eval(RunConfig cfg, const fs::path &checkpoint, const fs::path &manifest,
                                  const fs::path &out_root, const EvalOptions &opts, std::ostream &log) {
  cfg.sync();
  cfg.validate();
  std::vector<fs::path> ckpts = {checkpoint};
  if (opts.compare_checkpoint) ckpts.push_back(*opts.compare_checkpoint);
  std::vector<LoadedModel<float>> models;
  for (const auto &p : ckpts) {
    models.push_back(load_checkpoint<float>(p));
    check_compatible(models.back().config, cfg.model);
  }
  if (models.size() == 2 && models[0].config.head == models[1].config.head)
    detail::fail(ErrorCode::kConfigMismatch, "--compare needs one SR and one baseline checkpoint");

  const std::size_t N = cfg.model.n_keywords;
  const FeatureSet data = features_from_manifest(manifest, load_manifest(manifest, N), cfg.features, cfg.threads);
  std::optional<FeatureSet> ood;
  if (opts.ood_manifest)
    ood = features_from_manifest(*opts.ood_manifest, load_manifest(*opts.ood_manifest, N), cfg.features,
                                 cfg.threads);

  EvalCommandResult r;
  r.dir = detail::run_dir(out_root, "eval", models[0].config.head, cfg.seed);
  detail::make_dirs(r.dir);
  std::optional<KsCurve> ks_sr, ks_base;
  for (const auto &m : models) {
    Evaluation ev = evaluate_model(m.params, m.config, data);
    MetricsRow row{std::string(head_kind_name(m.config.head)), ev.metrics.accuracy,
                   ev.metrics.weighted_f1, ev.metrics.fa, std::nullopt, ev.n_params};
    if (ood) row.fa_ood = fa_on_negatives(m.params, m.config, *ood);
    r.rows.push_back(row);
    (m.config.head == HeadKind::kSr ? ks_sr : ks_base) = ev.ks_curve;
    if (opts.embeddings && m.config.head == HeadKind::kSr) {
      const fs::path p = r.dir / "embeddings.csv";
      auto os = detail::open_out(p);
      dump_embeddings(m.params, m.config, data, os);
      detail::close_out(os, p);
    }
  }
  {
    const fs::path p = r.dir / "metrics.csv";
    auto os = detail::open_out(p);
    write_metrics_csv(os, r.rows);
    detail::close_out(os, p);
  }
  {
    const fs::path p = r.dir / "ks.csv";
    auto os = detail::open_out(p);
    write_ks_csv(os, ks_sr, ks_base);
    detail::close_out(os, p);
  }
  detail::print_metrics_table(log, r.rows);
  log << "reports in " << r.dir.string() << '\n';
  if (!r.rows.front().fa) {
    log << "error: FA undefined, the manifest has no negative samples\n";
    r.exit_code = 1;
  }
  return r;
}

// ---------------------------------------------------------------------------
// stream

struct StreamCommandResult {
  fs::path dir;
  std::size_t windows = 0;
  double fa_rate = 0.0;
  double fa_per_hour = 0.0;
};

/// Classifies every window of a long recording and writes
/// `stream_report.csv`. The FA/hour figure assumes the recording is all
/// negatives.
inline StreamCommandResult cmd_stream(RunConfig cfg, const fs::path &checkpoint, const fs::path &wav,
                                      const fs::path &out_root, std::ostream &log) {
  cfg.sync();
  cfg.validate();
  const LoadedModel<float> m = load_checkpoint<float>(checkpoint);
  check_compatible(m.config, cfg.model);
  const AudioSignal audio = read_wav(wav);
  if (audio.sample_rate != cfg.features.sample_rate)
    detail::fail(ErrorCode::kConfigMismatch, wav.string(), ": sample rate ", audio.sample_rate,
                 ", features expect ", cfg.features.sample_rate);
  const FeatureExtractor fx(cfg.features);
  const auto windows = stream_detect(audio.samples, audio.sample_rate, cfg.stream,
                                     model_window_classifier(m.params, m.config, fx));
  StreamCommandResult r;
  r.dir = detail::run_dir(out_root, "stream", m.config.head, cfg.seed);
  detail::make_dirs(r.dir);
  const fs::path p = r.dir / "stream_report.csv";
  auto os = detail::open_out(p);
  write_stream_report(os, windows);
  detail::close_out(os, p);
  r.windows = windows.size();
  r.fa_rate = window_fa_rate(windows);
  r.fa_per_hour = fa_per_hour(r.fa_rate, cfg.stream.hop);
  char line[160];
  std::snprintf(line, sizeof line, "%zu windows, window FA rate %.6f, FA/hour %.2f\n", r.windows,
                r.fa_rate, r.fa_per_hour);
  log << line << "report " << p.string() << '\n';
  return r;
}

}  // namespace srkws

#endif  // SRKWS_COMMANDS_HPP_
