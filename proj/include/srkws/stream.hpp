// include/srkws/stream.hpp

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

#ifndef SRKWS_STREAM_HPP_
#define SRKWS_STREAM_HPP_

#include <cmath>
#include <cstdio>
#include <cstddef>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "srkws/error.hpp"
#include "srkws/features.hpp"
#include "srkws/inference.hpp"
#include "srkws/model.hpp"

namespace srkws {

struct StreamConfig {
  double window = 1.0;  // seconds
  double hop = 0.1;

  void validate() const {
    if (!(hop > 0 && window > 0 && hop <= window))
      detail::fail(ErrorCode::kInvalidArgument, "stream: need 0 < hop <= window");
  }
};

struct StreamWindow {
  double start = 0.0;  // seconds
  Decision decision;
  CombinedDist dist;
};

/// Number of whole windows that fit, stepping by `hop` samples.
inline std::size_t num_windows(std::size_t n_samples, std::size_t window, std::size_t hop) {
  if (n_samples < window) return 0;
  return (n_samples - window) / hop + 1;
}

/// Slides a fixed window over the signal and classifies each one on its own;
/// there is no smoothing, so identical windows always get identical output.
/// `classify_window` maps the raw window samples to a Classification.
inline std::vector<StreamWindow> stream_detect(
    std::span<const float> signal, int sample_rate, const StreamConfig &cfg,
    const std::function<Classification(std::span<const float>)> &classify_window) {
  cfg.validate();
  const auto win = static_cast<std::size_t>(std::llround(cfg.window * sample_rate));
  const auto hop = static_cast<std::size_t>(std::llround(cfg.hop * sample_rate));
  if (hop == 0) detail::fail(ErrorCode::kInvalidArgument, "stream hop is shorter than one sample");
  if (signal.size() < win)
    detail::fail(ErrorCode::kInvalidArgument, "stream of ", signal.size(),
                 " samples is shorter than one window (", win, ")");
  const std::size_t n = num_windows(signal.size(), win, hop);
  std::vector<StreamWindow> out;
  out.reserve(n);
  for (std::size_t w = 0; w < n; ++w) {
    Classification c = classify_window(signal.subspan(w * hop, win));
    out.push_back({static_cast<double>(w * hop) / sample_rate, c.decision, std::move(c.dist)});
  }
  return out;
}

/// Window classifier backed by a trained model and its feature front end.
template <typename T>
std::function<Classification(std::span<const float>)> model_window_classifier(
    const ParamStore<T> &params, const ModelConfig &cfg, const FeatureExtractor &fx) {
  return [&params, cfg, &fx](std::span<const float> window) {
    FeatureMap fm = fx.compute(window);
    const FeatureMap *ptr = &fm;
    return classify<T>(params, cfg, std::span<const FeatureMap *const>(&ptr, 1)).front();
  };
}

/// Expected false alarms per hour for a detector evaluated every `hop` s.
inline double fa_per_hour(double fa_rate, double hop) {
  if (!(hop > 0)) detail::fail(ErrorCode::kInvalidArgument, "fa_per_hour: hop must be > 0");
  if (!(fa_rate >= 0 && fa_rate <= 1))
    detail::fail(ErrorCode::kInvalidArgument, "fa_per_hour: rate must be in [0, 1]");
  return fa_rate * 3600.0 / hop;
}

/// Fraction of windows decided as any keyword.
inline double window_fa_rate(std::span<const StreamWindow> windows) {
  if (windows.empty()) return 0.0;
  std::size_t fa = 0;
  for (const auto &w : windows) fa += w.decision.is_keyword() ? 1 : 0;
  return static_cast<double>(fa) / static_cast<double>(windows.size());
}

/// start_time_s, decision_kind, keyword_index, p_0..p_{N+1}
inline void write_stream_report(std::ostream &os, std::span<const StreamWindow> windows) {
  os << "start_time_s,decision_kind,keyword_index";
  if (!windows.empty())
    for (std::size_t j = 0; j < windows.front().dist.p.size(); ++j) os << ",p" << j;
  os << '\n';
  auto old = os.precision(17);
  for (const auto &w : windows) {
    char start[32];
    std::snprintf(start, sizeof start, "%.6f", w.start);
    os << start << ',' << label_kind_name(w.decision.kind) << ','
       << (w.decision.keyword ? static_cast<long long>(*w.decision.keyword) : -1LL);
    for (double p : w.dist.p) os << ',' << p;
    os << '\n';
  }
  os.precision(old);
}

}  // namespace srkws

#endif  // SRKWS_STREAM_HPP_
