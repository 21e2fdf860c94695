// include/srkws/config.hpp

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

#ifndef SRKWS_CONFIG_HPP_
#define SRKWS_CONFIG_HPP_

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "srkws/data.hpp"
#include "srkws/error.hpp"
#include "srkws/features.hpp"
#include "srkws/model.hpp"
#include "srkws/schedule.hpp"
#include "srkws/stream.hpp"

namespace srkws {

// Settings for every subcommand. The file format is one `key = value` per
// line with dotted section prefixes; `#` starts a comment. Keys that a command
// does not need are still parsed and validated.

struct RunConfig {
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::size_t batch_size = 100;
  double selection_margin = 0.01;

  SynthConfig synth;
  std::size_t ood_samples_per_class = 0;  // 0: no out-of-domain corpus

  FeatureConfig features;
  ModelConfig model;

  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double gamma = 2.0;
  bool auto_class_weights = true;  // inverse-count weights from training data

  OneCycleConfig schedule;
  StreamConfig stream;

  std::string data_dir = "data";
  std::string checkpoint;
  std::string report_dir = "runs";

  /// Copies the global seed and shared sizes into the sub-configs.
  void sync() {
    synth.seed = seed;
    model.seed = seed;
    model.n_keywords = synth.n_keywords;
    model.bins = features.n_mels;
    model.frames = features.num_frames(
        static_cast<std::size_t>(std::llround(synth.duration * features.sample_rate)));
  }

  void validate() const {
    synth.validate();
    features.validate();
    model.validate();
    stream.validate();
    OneCycleConfig s = schedule;
    s.steps_per_epoch = 1;
    s.validate();
    if (synth.sample_rate != features.sample_rate)
      detail::fail(ErrorCode::kConfigMismatch, "synth.sample_rate (", synth.sample_rate,
                   ") differs from features.sample_rate (", features.sample_rate, ")");
    if (threads == 0) detail::fail(ErrorCode::kInvalidArgument, "threads must be >= 1");
    if (batch_size == 0) detail::fail(ErrorCode::kInvalidArgument, "train.batch_size must be >= 1");
    if (!(selection_margin >= 0)) detail::fail(ErrorCode::kInvalidArgument, "train.selection_margin must be >= 0");
    if (!(lambda1 >= 0 && lambda2 >= 0 && gamma >= 0))
      detail::fail(ErrorCode::kInvalidArgument, "loss weights and gamma must be >= 0");
    for (const std::string *p : {&data_dir, &report_dir})
      if (p->empty() || p->find('\0') != std::string::npos)
        detail::fail(ErrorCode::kInvalidArgument, "path settings must be non-empty");
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
T parse_number(const std::string &key, const std::string &text) {
  T v{};
  const char *end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end)
    fail(ErrorCode::kParse, "config key '", key, "': cannot parse '", text, "'");
  return v;
}


struct Binding {
  std::function<std::string(const RunConfig &)> get;
  std::function<void(RunConfig &, const std::string &)> set;
};

#define SRKWS_NUM(key, field, type)                                                        \
  {key,                                                                                    \
   {[](const RunConfig &c) {                                                               \
      if constexpr (std::is_floating_point_v<type>) return format_double(c.field);          \
      else return std::to_string(c.field);                                                 \
    },                                                                                     \
    [](RunConfig &c, const std::string &v) { c.field = parse_number<type>(key, v); }}}

inline const std::vector<std::pair<std::string, Binding>> &bindings() {
  static const std::vector<std::pair<std::string, Binding>> table = {
      SRKWS_NUM("seed", seed, std::uint64_t),
      SRKWS_NUM("threads", threads, std::size_t),
      SRKWS_NUM("train.batch_size", batch_size, std::size_t),
      SRKWS_NUM("train.selection_margin", selection_margin, double),
      SRKWS_NUM("synth.n_keywords", synth.n_keywords, std::size_t),
      SRKWS_NUM("synth.samples_per_class", synth.samples_per_class, std::size_t),
      SRKWS_NUM("synth.sample_rate", synth.sample_rate, int),
      SRKWS_NUM("synth.duration", synth.duration, double),
      SRKWS_NUM("synth.ood_samples_per_class", ood_samples_per_class, std::size_t),
      SRKWS_NUM("features.sample_rate", features.sample_rate, int),
      SRKWS_NUM("features.window_len", features.window_len, double),
      SRKWS_NUM("features.hop_len", features.hop_len, double),
      SRKWS_NUM("features.n_mels", features.n_mels, std::size_t),
      SRKWS_NUM("features.fmin", features.fmin, double),
      SRKWS_NUM("features.fmax", features.fmax, double),
      SRKWS_NUM("features.log_floor", features.log_floor, double),
      SRKWS_NUM("model.kernel", model.kernel, std::size_t),
      SRKWS_NUM("model.channels", model.channels, std::size_t),
      SRKWS_NUM("model.embed", model.embed, std::size_t),
      SRKWS_NUM("model.h_cls", model.h_cls, std::size_t),
      SRKWS_NUM("model.h_kw", model.h_kw, std::size_t),
      SRKWS_NUM("model.h_sp", model.h_sp, std::size_t),
      SRKWS_NUM("model.depth", model.depth, int),
      {"model.head",
       {[](const RunConfig &c) { return std::string(head_kind_name(c.model.head)); },
        [](RunConfig &c, const std::string &v) { c.model.head = parse_head_kind(v); }}},
      SRKWS_NUM("loss.lambda1", lambda1, double),
      SRKWS_NUM("loss.lambda2", lambda2, double),
      SRKWS_NUM("loss.gamma", gamma, double),
      {"loss.class_weights",
       {[](const RunConfig &c) { return std::string(c.auto_class_weights ? "auto" : "uniform"); },
        [](RunConfig &c, const std::string &v) {
          if (v != "auto" && v != "uniform")
            fail(ErrorCode::kParse, "loss.class_weights must be 'auto' or 'uniform', got '", v, "'");
          c.auto_class_weights = v == "auto";
        }}},
      SRKWS_NUM("schedule.lr_init", schedule.lr_init, double),
      SRKWS_NUM("schedule.lr_peak", schedule.lr_peak, double),
      SRKWS_NUM("schedule.lr_final", schedule.lr_final, double),
      SRKWS_NUM("schedule.warmup_epochs", schedule.warmup_epochs, std::size_t),
      SRKWS_NUM("schedule.total_epochs", schedule.total_epochs, std::size_t),
      SRKWS_NUM("schedule.momentum_low", schedule.momentum_low, double),
      SRKWS_NUM("schedule.momentum_high", schedule.momentum_high, double),
      SRKWS_NUM("stream.window", stream.window, double),
      SRKWS_NUM("stream.hop", stream.hop, double),
      {"paths.data_dir",
       {[](const RunConfig &c) { return c.data_dir; },
        [](RunConfig &c, const std::string &v) { c.data_dir = v; }}},
      {"paths.checkpoint",
       {[](const RunConfig &c) { return c.checkpoint; },
        [](RunConfig &c, const std::string &v) { c.checkpoint = v; }}},
      {"paths.report_dir",
       {[](const RunConfig &c) { return c.report_dir; },
        [](RunConfig &c, const std::string &v) { c.report_dir = v; }}},
  };
  return table;
}

#undef SRKWS_NUM

inline const Binding &find_binding(const std::string &key) {
  for (const auto &[k, b] : bindings())
    if (k == key) return b;
  fail(ErrorCode::kParse, "unknown config key '", key, "'");
}

}  // namespace detail

/// All recognised keys, in emission order.
inline std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto &[k, b] : detail::bindings()) keys.push_back(k);
  return keys;
}

inline void set_config_value(RunConfig &cfg, const std::string &key, const std::string &value) {
  detail::find_binding(key).set(cfg, value);
}

inline std::string get_config_value(const RunConfig &cfg, const std::string &key) {
  return detail::find_binding(key).get(cfg);
}

/// Applies every `key = value` line of `is` on top of `cfg`. Later lines win.
inline void parse_config(std::istream &is, RunConfig &cfg) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      detail::fail(ErrorCode::kParse, "config line ", line_no, ": expected key = value");
    const std::string key = detail::trim(std::string_view(body).substr(0, eq));
    const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
    try {
      set_config_value(cfg, key, value);
    } catch (const Error &e) {
      detail::fail(e.code(), "config line ", line_no, ": ", e.what());
    }
  }
}

inline RunConfig load_config(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is) detail::fail(ErrorCode::kFileNotFound, path.string());
  RunConfig cfg;
  parse_config(is, cfg);
  return cfg;
}

inline void write_config(std::ostream &os, const RunConfig &cfg) {
  for (const auto &[key, b] : detail::bindings()) os << key << " = " << b.get(cfg) << '\n';
}

}  // namespace srkws

#endif  // SRKWS_CONFIG_HPP_
