// include/srkws/feature_set.hpp

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

#ifndef SRKWS_FEATURE_SET_HPP_
#define SRKWS_FEATURE_SET_HPP_

#include <algorithm>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "srkws/data.hpp"
#include "srkws/features.hpp"
#include "srkws/hier_label.hpp"

namespace srkws {

/// Precomputed features with their labels; ids name each sample in reports.
struct FeatureSet {
  std::vector<FeatureMap> maps;
  std::vector<HierLabel> labels;
  std::vector<std::string> ids;

  std::size_t size() const { return maps.size(); }

  std::vector<const FeatureMap *> pointers() const {
    std::vector<const FeatureMap *> out;
    out.reserve(maps.size());
    for (const auto &m : maps) out.push_back(&m);
    return out;
  }

  FeatureSet subset(std::span<const std::size_t> idx) const {
    FeatureSet out;
    for (auto i : idx) {
      out.maps.push_back(maps[i]);
      out.labels.push_back(labels[i]);
      out.ids.push_back(ids[i]);
    }
    return out;
  }
};

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
/// handled exactly once and results are written by index, so output does not
/// depend on the thread count.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn &&fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += threads) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto &t : pool) t.join();
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

inline FeatureSet features_from_clips(std::span<const LabeledClip> clips, const FeatureConfig &cfg,
                                      std::size_t threads = 1) {
  FeatureExtractor fx(cfg);
  FeatureSet fs;
  fs.maps.resize(clips.size());
  for (std::size_t i = 0; i < clips.size(); ++i) {
    fs.labels.push_back(clips[i].label);
    fs.ids.push_back("clip" + std::to_string(i));
  }
  parallel_for(clips.size(), threads, [&](std::size_t i) {
    if (clips[i].audio.sample_rate != cfg.sample_rate)
      detail::fail(ErrorCode::kConfigMismatch, "clip ", i, " has sample rate ",
                   clips[i].audio.sample_rate, ", features expect ", cfg.sample_rate);
    fs.maps[i] = fx.compute(clips[i].audio.samples);
  });
  return fs;
}

/// Reads every WAV in a manifest and computes its features.
inline FeatureSet features_from_manifest(const std::filesystem::path &manifest_path,
                                         std::span<const ManifestEntry> entries,
                                         const FeatureConfig &cfg, std::size_t threads = 1) {
  FeatureExtractor fx(cfg);
  FeatureSet fs;
  fs.maps.resize(entries.size());
  for (const auto &e : entries) {
    fs.labels.push_back(e.label);
    fs.ids.push_back(e.path);
  }
  parallel_for(entries.size(), threads, [&](std::size_t i) {
    AudioSignal a = read_wav(resolve_entry_path(manifest_path, entries[i]));
    if (a.sample_rate != cfg.sample_rate)
      detail::fail(ErrorCode::kConfigMismatch, entries[i].path, ": sample rate ", a.sample_rate,
                   ", features expect ", cfg.sample_rate);
    fs.maps[i] = fx.compute(a.samples);
  });
  return fs;
}

}  // namespace srkws

#endif  // SRKWS_FEATURE_SET_HPP_
