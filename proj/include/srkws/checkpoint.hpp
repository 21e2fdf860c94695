// include/srkws/checkpoint.hpp

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

#ifndef SRKWS_CHECKPOINT_HPP_
#define SRKWS_CHECKPOINT_HPP_

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "srkws/error.hpp"
#include "srkws/feature_set.hpp"
#include "srkws/model.hpp"
#include "srkws/tensor.hpp"

namespace srkws {

inline constexpr int kCheckpointVersion = 1;

inline nlohmann::ordered_json model_config_to_json(const ModelConfig &cfg) {
  nlohmann::ordered_json j;
  j["n_keywords"] = cfg.n_keywords;
  j["frames"] = cfg.frames;
  j["bins"] = cfg.bins;
  j["kernel"] = cfg.kernel;
  j["channels"] = cfg.channels;
  j["embed"] = cfg.embed;
  j["h_cls"] = cfg.h_cls;
  j["h_kw"] = cfg.h_kw;
  j["h_sp"] = cfg.h_sp;
  j["depth"] = cfg.depth;
  j["head"] = std::string(head_kind_name(cfg.head));
  j["seed"] = cfg.seed;
  j["input_mean"] = cfg.input_mean;
  j["input_std"] = cfg.input_std;
  return j;
}

inline ModelConfig model_config_from_json(const nlohmann::json &j) {
  ModelConfig cfg;
  try {
    cfg.n_keywords = j.at("n_keywords").get<std::size_t>();
    cfg.frames = j.at("frames").get<std::size_t>();
    cfg.bins = j.at("bins").get<std::size_t>();
    cfg.kernel = j.at("kernel").get<std::size_t>();
    cfg.channels = j.at("channels").get<std::size_t>();
    cfg.embed = j.at("embed").get<std::size_t>();
    cfg.h_cls = j.at("h_cls").get<std::size_t>();
    cfg.h_kw = j.at("h_kw").get<std::size_t>();
    cfg.h_sp = j.at("h_sp").get<std::size_t>();
    cfg.depth = j.at("depth").get<int>();
    cfg.head = parse_head_kind(j.at("head").get<std::string>());
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.input_mean = j.at("input_mean").get<double>();
    cfg.input_std = j.at("input_std").get<double>();
  } catch (const nlohmann::json::exception &e) {
    detail::fail(ErrorCode::kParse, "checkpoint config: ", e.what());
  }
  cfg.validate();
  return cfg;
}

/// Values are written in shortest round-trip decimal form, which restores
/// every stored value bit-exactly.
template <typename T>
void save_checkpoint(std::ostream &os, const ParamStore<T> &params, const ModelConfig &cfg) {
  nlohmann::ordered_json j;
  j["version"] = kCheckpointVersion;
  j["config"] = model_config_to_json(cfg);
  nlohmann::ordered_json ps = nlohmann::ordered_json::object();
  for (const auto &[name, p] : params) {
    nlohmann::ordered_json e;
    e["shape"] = p.value.shape();
    std::vector<double> data(p.value.storage().begin(), p.value.storage().end());
    e["data"] = data;
    ps[name] = std::move(e);
  }
  j["params"] = std::move(ps);
  os << j.dump() << '\n';
}

template <typename T>
void save_checkpoint(const std::filesystem::path &path, const ParamStore<T> &params,
                     const ModelConfig &cfg) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) detail::fail(ErrorCode::kIo, "cannot write ", path.string());
  save_checkpoint(os, params, cfg);
  if (!os) detail::fail(ErrorCode::kIo, "short write to ", path.string());
}

template <typename T>
struct LoadedModel {
  ParamStore<T> params;
  ModelConfig config;
};

template <typename T>
LoadedModel<T> load_checkpoint(std::istream &is) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception &e) {
    detail::fail(ErrorCode::kParse, "corrupt checkpoint: ", e.what());
  }
  if (!j.is_object() || !j.contains("version") || !j["version"].is_number_integer())
    detail::fail(ErrorCode::kParse, "checkpoint has no version field");
  if (j["version"].get<int>() != kCheckpointVersion)
    detail::fail(ErrorCode::kVersionMismatch, "checkpoint version ", j["version"].get<int>(),
                 ", expected ", kCheckpointVersion);
  if (!j.contains("config") || !j.contains("params") || !j["params"].is_object())
    detail::fail(ErrorCode::kParse, "checkpoint lacks config or params");

  LoadedModel<T> m;
  m.config = model_config_from_json(j["config"]);
  const auto layout = param_layout(m.config);
  if (j["params"].size() != layout.size())
    detail::fail(ErrorCode::kShapeMismatch, "checkpoint has ", j["params"].size(),
                 " parameters, config implies ", layout.size());
  for (const ParamSpec &spec : layout) {
    if (!j["params"].contains(spec.name))
      detail::fail(ErrorCode::kShapeMismatch, "checkpoint lacks parameter '", spec.name, "'");
    const auto &e = j["params"][spec.name];
    Shape shape;
    std::vector<double> data;
    try {
      shape = e.at("shape").get<Shape>();
      data = e.at("data").get<std::vector<double>>();
    } catch (const nlohmann::json::exception &ex) {
      detail::fail(ErrorCode::kParse, "parameter '", spec.name, "': ", ex.what());
    }
    if (shape != spec.shape)
      detail::fail(ErrorCode::kShapeMismatch, "parameter '", spec.name, "' has shape ",
                   shape_str(shape), ", config implies ", shape_str(spec.shape));
    if (data.size() != shape_size(shape))
      detail::fail(ErrorCode::kShapeMismatch, "parameter '", spec.name, "' has ", data.size(),
                   " values for shape ", shape_str(shape));
    m.params.add(spec.name, shape).value = Tensor<T>(shape, std::vector<T>(data.begin(), data.end()));
  }
  return m;
}

template <typename T>
LoadedModel<T> load_checkpoint(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is) detail::fail(ErrorCode::kFileNotFound, path.string());
  return load_checkpoint<T>(is);
}

/// A checkpoint can serve a run only if it agrees on the keyword set and on
/// the input feature shape.
inline void check_compatible(const ModelConfig &checkpoint, const ModelConfig &run) {
  if (checkpoint.n_keywords != run.n_keywords)
    detail::fail(ErrorCode::kConfigMismatch, "checkpoint has ", checkpoint.n_keywords,
                 " keywords, run expects ", run.n_keywords);
  if (checkpoint.frames != run.frames || checkpoint.bins != run.bins)
    detail::fail(ErrorCode::kConfigMismatch, "checkpoint input ", checkpoint.frames, "x",
                 checkpoint.bins, ", run features ", run.frames, "x", run.bins);
}

/// Writes, per sample, the hidden activations of the speech, keyword-like
/// and keyword-classifier branches (in that order) with the sample's label.
template <typename T>
void dump_embeddings(const ParamStore<T> &params, const ModelConfig &cfg, const FeatureSet &data,
                     std::ostream &os, std::size_t batch_size = 100) {
  if (cfg.head != HeadKind::kSr)
    detail::fail(ErrorCode::kConfigMismatch, "embedding dump needs an SR model");
  if (cfg.depth != 2)
    detail::fail(ErrorCode::kConfigMismatch, "embedding dump needs depth-2 branches");
  const std::array<std::size_t, 3> order = {kSp, kKw, kCls};
  os << "sample_id,label_kind,keyword_index";
  for (std::size_t br : order)
    for (std::size_t j = 0; j < branch_width(cfg, br); ++j) os << ',' << kBranchNames[br] << j;
  os << '\n';
  auto old = os.precision(9);
  auto ptrs = data.pointers();
  for (std::size_t start = 0; start < data.size(); start += batch_size) {
    const std::size_t n = std::min(batch_size, data.size() - start);
    auto fp = forward_sr(params, cfg, make_batch<T>(std::span(ptrs).subspan(start, n), cfg));
    for (std::size_t i = 0; i < n; ++i) {
      const HierLabel &l = data.labels[start + i];
      os << data.ids[start + i] << ',' << label_kind_name(l.kind()) << ','
         << (l.c ? static_cast<long long>(*l.c) : -1LL);
      for (std::size_t br : order) {
        const Tensor<T> &h = fp.heads[br].hidden;
        const std::size_t w = h.dim(1);
        for (std::size_t j = 0; j < w; ++j) os << ',' << static_cast<double>(h[i * w + j]);
      }
      os << '\n';
    }
  }
  os.precision(old);
}

}  // namespace srkws

#endif  // SRKWS_CHECKPOINT_HPP_
