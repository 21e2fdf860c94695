// include/srkws/data.hpp

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

#ifndef SRKWS_DATA_HPP_
#define SRKWS_DATA_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "srkws/error.hpp"
#include "srkws/hier_label.hpp"
#include "srkws/random.hpp"
#include "srkws/wav.hpp"

namespace srkws {

// ---------------------------------------------------------------------------
// Manifests

struct ManifestEntry {
  std::string path;
  HierLabel label;

  bool operator==(const ManifestEntry &) const = default;
};

inline nlohmann::ordered_json manifest_record(const ManifestEntry &entry) {
  nlohmann::ordered_json j;
  j["path"] = entry.path;
  j["label_kind"] = std::string(label_kind_name(entry.label.kind()));
  if (entry.label.c) j["keyword_index"] = *entry.label.c;
  return j;
}

/// Parses one manifest record. `n_keywords`, when given, bounds keyword_index.
inline ManifestEntry parse_manifest_record(const std::string &line, std::size_t line_no,
                                           std::optional<std::size_t> n_keywords = {}) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception &e) {
    detail::fail(ErrorCode::kParse, "manifest line ", line_no, ": ", e.what());
  }
  if (!j.is_object()) detail::fail(ErrorCode::kParse, "manifest line ", line_no, ": not an object");
  if (!j.contains("path") || !j["path"].is_string() || j["path"].get<std::string>().empty())
    detail::fail(ErrorCode::kParse, "manifest line ", line_no, ": missing or empty 'path'");
  if (!j.contains("label_kind") || !j["label_kind"].is_string())
    detail::fail(ErrorCode::kParse, "manifest line ", line_no, ": missing 'label_kind'");

  ManifestEntry entry;
  entry.path = j["path"].get<std::string>();
  LabelKind kind;
  try {
    kind = parse_label_kind(j["label_kind"].get<std::string>());
  } catch (const Error &e) {
    detail::fail(ErrorCode::kInvalidLabel, "manifest line ", line_no, ": ", e.what());
  }
  bool has_index = j.contains("keyword_index");
  if (kind == LabelKind::kKeyword) {
    if (!has_index || !j["keyword_index"].is_number_unsigned())
      detail::fail(ErrorCode::kInvalidLabel, "manifest line ", line_no,
                   ": keyword record needs a non-negative integer keyword_index");
    entry.label = HierLabel::keyword(j["keyword_index"].get<std::size_t>());
  } else {
    if (has_index)
      detail::fail(ErrorCode::kInvalidLabel, "manifest line ", line_no,
                   ": keyword_index present on a ", label_kind_name(kind), " record");
    entry.label = kind == LabelKind::kNonKeywordSpeech ? HierLabel::non_keyword_speech()
                                                       : HierLabel::non_speech();
  }
  if (n_keywords && !is_valid(entry.label, *n_keywords))
    detail::fail(ErrorCode::kInvalidLabel, "manifest line ", line_no, ": keyword_index ",
                 *entry.label.c, " out of range for ", *n_keywords, " keywords");
  return entry;
}

inline std::vector<ManifestEntry> load_manifest(const std::filesystem::path &path,
                                                std::optional<std::size_t> n_keywords = {}) {
  std::ifstream in(path);
  if (!in) detail::fail(ErrorCode::kFileNotFound, path.string());
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    entries.push_back(parse_manifest_record(line, line_no, n_keywords));
  }
  return entries;
}

inline void save_manifest(const std::filesystem::path &path,
                          const std::vector<ManifestEntry> &entries) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) detail::fail(ErrorCode::kIo, "cannot write ", path.string());
  for (const auto &e : entries) out << manifest_record(e).dump() << '\n';
  if (!out) detail::fail(ErrorCode::kIo, "short write to ", path.string());
}

/// Relative manifest paths are resolved against the manifest's directory.
inline std::filesystem::path resolve_entry_path(const std::filesystem::path &manifest_path,
                                                const ManifestEntry &entry) {
  std::filesystem::path p(entry.path);
  if (p.is_absolute()) return p;
  return manifest_path.parent_path() / p;
}

// ---------------------------------------------------------------------------
// Splitting

struct DatasetSplit {
  std::vector<ManifestEntry> train, validation, test;
};

/// Per-class split sizes: validation max(1, floor(n/10)), train
/// floor(8n/10) capped so test keeps at least one, test the remainder.
struct SplitSizes {
  std::size_t train, validation, test;
};

inline SplitSizes split_sizes(std::size_t n) {
  if (n < 3) detail::fail(ErrorCode::kInsufficientData, "class has ", n, " samples, need >= 3");
  std::size_t val = std::max<std::size_t>(1, n / 10);
  std::size_t train = std::min(n * 8 / 10, n - val - 1);
  return {train, val, n - train - val};
}

/// Stratified, seeded 8:1:1 split. Each split keeps the input order.
template <typename Item, typename LabelOf>
void split_indices(const std::vector<Item> &items, LabelOf label_of, std::uint64_t seed,
                   std::vector<std::size_t> &train, std::vector<std::size_t> &validation,
                   std::vector<std::size_t> &test) {
  if (items.empty()) detail::fail(ErrorCode::kInsufficientData, "cannot split an empty dataset");
  // Class key orders keywords by index, then non-keyword speech, then non-speech.
  std::map<std::pair<int, std::size_t>, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const HierLabel &l = label_of(items[i]);
    by_class[{static_cast<int>(l.kind()), l.c.value_or(0)}].push_back(i);
  }
  Rng rng(mix_seed(seed, 0x5317));
  train.clear();
  validation.clear();
  test.clear();
  for (auto &[key, idx] : by_class) {
    SplitSizes sz = split_sizes(idx.size());
    shuffle(idx, rng);
    train.insert(train.end(), idx.begin(), idx.begin() + sz.train);
    validation.insert(validation.end(), idx.begin() + sz.train,
                      idx.begin() + sz.train + sz.validation);
    test.insert(test.end(), idx.begin() + sz.train + sz.validation, idx.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(validation.begin(), validation.end());
  std::sort(test.begin(), test.end());
}

inline DatasetSplit split_dataset(const std::vector<ManifestEntry> &entries, std::uint64_t seed) {
  std::vector<std::size_t> tr, va, te;
  split_indices(entries, [](const ManifestEntry &e) -> const HierLabel & { return e.label; }, seed,
                tr, va, te);
  DatasetSplit split;
  for (auto i : tr) split.train.push_back(entries[i]);
  for (auto i : va) split.validation.push_back(entries[i]);
  for (auto i : te) split.test.push_back(entries[i]);
  return split;
}

// ---------------------------------------------------------------------------
// Synthetic corpus
//
// Keywords are two-tone patterns under a rise-fall envelope peaking near the
// middle of the clip. Non-keyword speech re-uses the same frequency range with
// a near-flat, lightly modulated energy profile. Non-speech is coloured noise,
// sometimes shaped into a transient burst, or near-silent room tone.

struct SynthConfig {
  std::size_t n_keywords = 3;
  std::size_t samples_per_class = 500;
  int sample_rate = 16000;
  double duration = 1.0;
  std::uint64_t seed = 1;
  /// Generate only negatives from shifted distributions (unseen speakers/noise).
  bool out_of_domain = false;

  void validate() const {
    if (n_keywords < 1) detail::fail(ErrorCode::kInvalidArgument, "synth.n_keywords must be >= 1");
    if (!(duration > 0)) detail::fail(ErrorCode::kInvalidArgument, "synth.duration must be > 0");
    if (sample_rate <= 0)
      detail::fail(ErrorCode::kInvalidArgument, "synth.sample_rate must be > 0");
  }
};

struct LabeledClip {
  AudioSignal audio;
  HierLabel label;
};

/// Carrier frequencies of keyword `c`, syllable `j` (0 or 1).
inline double keyword_frequency(std::size_t c, int j) {
  double k = static_cast<double>(2 * c + static_cast<std::size_t>(j) + 1);
  double frac = k * 0.6180339887498949 - std::floor(k * 0.6180339887498949);
  return 350.0 + 2300.0 * frac;
}

namespace detail {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Voiced tone: fundamental plus a weaker second harmonic.
inline double voiced(double phase) { return (std::sin(phase) + 0.3 * std::sin(2.0 * phase)) / 1.3; }

inline void add_background(std::vector<float> &x, Rng &rng, double lo = -3.0, double hi = -2.3) {
  double level = std::pow(10.0, uniform(rng, lo, hi));
  for (auto &v : x) v += static_cast<float>(level * normal(rng));
}

inline void clip_to_range(std::vector<float> &x) {
  for (auto &v : x) v = std::clamp(v, -1.0f, 32767.0f / 32768.0f);
}

inline std::vector<float> synth_keyword(std::size_t c, std::size_t n, int sr, Rng &rng) {
  std::vector<float> x(n, 0.0f);
  const double dur = static_cast<double>(n) / sr;
  const double f1 = keyword_frequency(c, 0) * (1.0 + 0.03 * uniform(rng, -1.0, 1.0));
  const double f2 = keyword_frequency(c, 1) * (1.0 + 0.03 * uniform(rng, -1.0, 1.0));
  const double center = dur * (0.5 + 0.08 * uniform(rng, -1.0, 1.0));
  const double width = dur * uniform(rng, 0.35, 0.5);
  const double amp = uniform(rng, 0.3, 0.8);
  const double start = center - width / 2;
  double phase = uniform(rng, 0.0, kTwoPi);
  for (std::size_t i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / sr;
    double f = t < center ? f1 : f2;
    phase += kTwoPi * f / sr;
    double u = (t - start) / width;
    if (u <= 0.0 || u >= 1.0) continue;
    double s = std::sin(std::numbers::pi * u);
    x[i] = static_cast<float>(amp * s * s * voiced(phase));
  }
  return x;
}

inline std::vector<float> synth_speech(std::size_t n, int sr, std::size_t n_keywords, bool ood,
                                       Rng &rng) {
  std::vector<float> x(n, 0.0f);
  const int n_seg = static_cast<int>(uniform_int(rng, 4, 7));
  std::vector<double> freq(static_cast<std::size_t>(n_seg));
  for (auto &f : freq) {
    if (!ood && uniform(rng, 0.0, 1.0) < 0.3) {
      // Borrow a keyword syllable so the spectrum alone cannot separate them.
      f = keyword_frequency(uniform_int(rng, 0, static_cast<std::int64_t>(n_keywords) - 1),
                            static_cast<int>(uniform_int(rng, 0, 1)));
    } else {
      f = ood ? uniform(rng, 1500.0, 5000.0) : uniform(rng, 250.0, 2800.0);
    }
  }
  const double amp = uniform(rng, 0.2, 0.6);
  const double rate = uniform(rng, 3.0, 6.0);
  const double depth = ood ? 0.35 : 0.15;
  const double mod_phase = uniform(rng, 0.0, kTwoPi);
  double phase = uniform(rng, 0.0, kTwoPi);
  for (std::size_t i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / sr;
    auto seg = std::min<std::size_t>(static_cast<std::size_t>(n_seg) * i / n,
                                     static_cast<std::size_t>(n_seg) - 1);
    phase += kTwoPi * freq[seg] / sr;
    double env = amp * (1.0 + depth * std::sin(kTwoPi * rate * t + mod_phase));
    x[i] = static_cast<float>(env * voiced(phase));
  }
  return x;
}

inline std::vector<float> synth_noise(std::size_t n, int sr, bool ood, Rng &rng) {
  std::vector<float> x(n, 0.0f);
  const double cutoff = ood ? uniform(rng, 2000.0, 7000.0) : uniform(rng, 200.0, 4000.0);
  const double a = std::exp(-kTwoPi * cutoff / sr);
  const double amp = uniform(rng, 0.03, 0.25);
  // Stationary standard deviation of the filtered (and differenced) noise.
  double sd = std::sqrt((1.0 - a) / (1.0 + a));
  if (ood) sd *= std::sqrt(2.0 * (1.0 - a));
  const bool burst = uniform(rng, 0.0, 1.0) < 0.3;
  const double center = uniform(rng, 0.3, 0.7), width = uniform(rng, 0.2, 0.5);
  double y = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double w = normal(rng);
    y = a * y + (1.0 - a) * w;  // one-pole low-pass
    double v = y;
    if (ood) {
      v = y - prev;  // first difference tilts the spectrum upward
      prev = y;
    }
    double env = 1.0;
    if (burst) {
      double u = (static_cast<double>(i) / n - (center - width / 2)) / width;
      env = (u <= 0.0 || u >= 1.0) ? 0.05 : 0.05 + std::sin(std::numbers::pi * u);
    }
    x[i] = static_cast<float>(amp * env * v / sd);
  }
  return x;
}

}  // namespace detail

/// Generates one synthetic clip. Each clip draws from its own seeded stream,
/// so the corpus is independent of generation order.
inline LabeledClip synth_clip(const SynthConfig &cfg, const HierLabel &label, std::size_t item) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(std::llround(cfg.duration * cfg.sample_rate));
  Rng rng(mix_seed(cfg.seed, class_index(label, cfg.n_keywords), item, cfg.out_of_domain ? 1 : 0));
  LabeledClip clip;
  clip.label = label;
  clip.audio.sample_rate = cfg.sample_rate;
  switch (label.kind()) {
    case LabelKind::kKeyword:
      clip.audio.samples = detail::synth_keyword(*label.c, n, cfg.sample_rate, rng);
      break;
    case LabelKind::kNonKeywordSpeech:
      clip.audio.samples =
          detail::synth_speech(n, cfg.sample_rate, cfg.n_keywords, cfg.out_of_domain, rng);
      break;
    case LabelKind::kNonSpeech:
      // A fifth of in-domain non-speech is near-silent room tone.
      if (!cfg.out_of_domain && uniform(rng, 0.0, 1.0) < 0.2) {
        clip.audio.samples.assign(n, 0.0f);
        detail::add_background(clip.audio.samples, rng, -6.0, -4.0);
        return clip;
      }
      clip.audio.samples = detail::synth_noise(n, cfg.sample_rate, cfg.out_of_domain, rng);
      break;
  }
  detail::add_background(clip.audio.samples, rng);
  detail::clip_to_range(clip.audio.samples);
  return clip;
}

/// Labels in emission order: samples_per_class of each keyword, then
/// non-keyword speech, then non-speech. Out-of-domain corpora hold only the
/// two negative classes.
inline std::vector<HierLabel> synth_labels(const SynthConfig &cfg) {
  cfg.validate();
  std::vector<HierLabel> labels;
  if (!cfg.out_of_domain)
    for (std::size_t c = 0; c < cfg.n_keywords; ++c)
      labels.insert(labels.end(), cfg.samples_per_class, HierLabel::keyword(c));
  labels.insert(labels.end(), cfg.samples_per_class, HierLabel::non_keyword_speech());
  labels.insert(labels.end(), cfg.samples_per_class, HierLabel::non_speech());
  return labels;
}

inline std::vector<LabeledClip> synth_generate(const SynthConfig &cfg) {
  std::vector<HierLabel> labels = synth_labels(cfg);
  std::vector<LabeledClip> clips;
  clips.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    clips.push_back(synth_clip(cfg, labels[i], i % cfg.samples_per_class));
  return clips;
}

}  // namespace srkws

#endif  // SRKWS_DATA_HPP_
