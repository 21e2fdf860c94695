// tests/test_util.hpp

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

#ifndef SRKWS_TESTS_TEST_UTIL_HPP_
#define SRKWS_TESTS_TEST_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "srkws/features.hpp"
#include "srkws/hier_label.hpp"
#include "srkws/model.hpp"
#include "srkws/random.hpp"
#include "srkws/tensor.hpp"

namespace srkws::testing {

/// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string &name) {
  auto dir = std::filesystem::temp_directory_path() / ("srkws_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

template <typename T>
Tensor<T> random_tensor(const Shape &shape, Rng &rng, double lo = -1.0, double hi = 1.0) {
  Tensor<T> t(shape);
  for (auto &v : t.values()) v = static_cast<T>(uniform(rng, lo, hi));
  return t;
}

inline FeatureMap random_map(std::size_t frames, std::size_t bins, Rng &rng) {
  FeatureMap m;
  m.frames = frames;
  m.bins = bins;
  m.values.resize(frames * bins);
  for (auto &v : m.values) v = static_cast<float>(uniform(rng, -2.0, 2.0));
  return m;
}

/// Small SR config for gradient checks and fast unit tests.
inline ModelConfig tiny_model(HeadKind head = HeadKind::kSr, std::uint64_t seed = 7) {
  ModelConfig cfg;
  cfg.n_keywords = 3;
  cfg.frames = 8;
  cfg.bins = 5;
  cfg.kernel = 3;
  cfg.channels = 4;
  cfg.embed = 6;
  cfg.h_cls = 5;
  cfg.h_kw = 4;
  cfg.h_sp = 3;
  cfg.head = head;
  cfg.seed = seed;
  return cfg;
}

/// Two keywords, one non-keyword speech, one non-speech.
inline std::vector<HierLabel> mixed_labels() {
  return {HierLabel::keyword(0), HierLabel::keyword(2), HierLabel::non_keyword_speech(),
          HierLabel::non_speech()};
}

}  // namespace srkws::testing

#endif  // SRKWS_TESTS_TEST_UTIL_HPP_
