// include/srkws/model.hpp

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

#ifndef SRKWS_MODEL_HPP_
#define SRKWS_MODEL_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "srkws/error.hpp"
#include "srkws/features.hpp"
#include "srkws/layers.hpp"
#include "srkws/random.hpp"
#include "srkws/tensor.hpp"

namespace srkws {

enum class HeadKind { kSr, kBaseline };

inline std::string_view head_kind_name(HeadKind kind) {
  return kind == HeadKind::kSr ? "sr" : "baseline";
}

inline HeadKind parse_head_kind(std::string_view name) {
  if (name == "sr") return HeadKind::kSr;
  if (name == "baseline") return HeadKind::kBaseline;
  detail::fail(ErrorCode::kInvalidArgument, "head kind must be 'sr' or 'baseline', got '", name, "'");
}

/// Backbone: conv1d_time -> relu -> mean over time -> dense(embed) -> relu.
/// Each successive-refinement branch is dense(h) -> relu -> dense(out) at
/// depth 2, or a single dense(out) at depth 1. The baseline replaces the three
/// branches with one (N+2)-way head of hidden width h_cls + h_kw + h_sp.
struct ModelConfig {
  std::size_t n_keywords = 3;
  std::size_t frames = 98;
  std::size_t bins = 40;
  std::size_t kernel = 5;
  std::size_t channels = 16;
  std::size_t embed = 32;
  std::size_t h_cls = 32;
  std::size_t h_kw = 32;
  std::size_t h_sp = 32;
  int depth = 2;
  HeadKind head = HeadKind::kSr;
  std::uint64_t seed = 1;
  // Inputs are standardised as (x - input_mean) / input_std before the
  // backbone; set from training-set statistics.
  double input_mean = 0.0;
  double input_std = 1.0;

  std::size_t num_classes() const { return n_keywords + 2; }
  std::size_t baseline_hidden() const { return h_cls + h_kw + h_sp; }

  void validate() const {
    if (n_keywords < 1) detail::fail(ErrorCode::kInvalidArgument, "model.n_keywords must be >= 1");
    if (frames < 1 || bins < 1 || kernel < 1 || channels < 1 || embed < 1 || h_cls < 1 ||
        h_kw < 1 || h_sp < 1)
      detail::fail(ErrorCode::kInvalidArgument, "model widths must be >= 1");
    if (kernel > frames)
      detail::fail(ErrorCode::kInvalidArgument, "model.kernel (", kernel, ") exceeds frames (",
                   frames, ")");
    if (depth != 1 && depth != 2) detail::fail(ErrorCode::kInvalidArgument, "model.depth must be 1 or 2");
    if (!(input_std > 0) || !std::isfinite(input_mean))
      detail::fail(ErrorCode::kInvalidArgument, "model input normalisation needs std > 0");
  }

  bool operator==(const ModelConfig &) const = default;
};

struct ParamSpec {
  std::string name;
  Shape shape;
  std::size_t fan_in = 0, fan_out = 0;
  bool is_bias = false;
};

enum Branch : std::size_t { kCls = 0, kKw = 1, kSp = 2 };
inline constexpr std::array<std::string_view, 3> kBranchNames = {"cls", "kw", "sp"};

namespace detail {

inline void add_dense_spec(std::vector<ParamSpec> &out, const std::string &prefix, std::size_t in,
                           std::size_t o) {
  out.push_back({prefix + ".w", {in, o}, in, o, false});
  out.push_back({prefix + ".b", {o}, in, o, true});
}

inline void add_head_spec(std::vector<ParamSpec> &out, const std::string &prefix, std::size_t in,
                          std::size_t hidden, std::size_t o, int depth) {
  if (depth == 2) {
    add_dense_spec(out, prefix + ".fc1", in, hidden);
    add_dense_spec(out, prefix + ".out", hidden, o);
  } else {
    add_dense_spec(out, prefix + ".out", in, o);
  }
}

}  // namespace detail

inline std::size_t branch_width(const ModelConfig &cfg, std::size_t branch) {
  return branch == kCls ? cfg.h_cls : branch == kKw ? cfg.h_kw : cfg.h_sp;
}

inline std::size_t branch_outputs(const ModelConfig &cfg, std::size_t branch) {
  return branch == kCls ? cfg.n_keywords : 1;
}

/// Every parameter the config implies, in initialisation order.
inline std::vector<ParamSpec> param_layout(const ModelConfig &cfg) {
  cfg.validate();
  std::vector<ParamSpec> out;
  const std::size_t K = cfg.kernel, F = cfg.bins, C = cfg.channels;
  out.push_back({"backbone.conv.w", {K, F, C}, K * F, K * C, false});
  out.push_back({"backbone.conv.b", {C}, K * F, K * C, true});
  detail::add_dense_spec(out, "backbone.fc", C, cfg.embed);
  if (cfg.head == HeadKind::kSr) {
    for (std::size_t br = 0; br < 3; ++br)
      detail::add_head_spec(out, std::string(kBranchNames[br]), cfg.embed, branch_width(cfg, br),
                            branch_outputs(cfg, br), cfg.depth);
  } else {
    detail::add_head_spec(out, "head", cfg.embed, cfg.baseline_hidden(), cfg.num_classes(),
                          cfg.depth);
  }
  return out;
}

inline bool is_backbone_param(std::string_view name) { return name.rfind("backbone.", 0) == 0; }

/// Glorot-uniform weights, zero biases, deterministic in cfg.seed.
template <typename T>
ParamStore<T> init_model(const ModelConfig &cfg) {
  ParamStore<T> params;
  Rng rng(mix_seed(cfg.seed, 0x1417));
  for (const ParamSpec &spec : param_layout(cfg)) {
    Param<T> &p = params.add(spec.name, spec.shape);
    if (spec.is_bias) continue;
    const double a = std::sqrt(6.0 / static_cast<double>(spec.fan_in + spec.fan_out));
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      // Open interval (0, 1) keeps |w| strictly below the bound.
      double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
      p.value[i] = static_cast<T>(a * (2.0 * u - 1.0));
    }
  }
  return params;
}

/// Packs feature maps into a standardised [B x frames x bins] tensor.
template <typename T>
Tensor<T> make_batch(std::span<const FeatureMap *const> maps, const ModelConfig &cfg) {
  Tensor<T> x({maps.size(), cfg.frames, cfg.bins});
  const double inv_std = 1.0 / cfg.input_std;
  for (std::size_t b = 0; b < maps.size(); ++b) {
    const FeatureMap &m = *maps[b];
    if (m.frames != cfg.frames || m.bins != cfg.bins)
      detail::fail(ErrorCode::kShapeMismatch, "feature map ", m.frames, "x", m.bins,
                   " does not match model input ", cfg.frames, "x", cfg.bins);
    T *dst = x.data() + b * cfg.frames * cfg.bins;
    for (std::size_t i = 0; i < m.values.size(); ++i)
      dst[i] = static_cast<T>((static_cast<double>(m.values[i]) - cfg.input_mean) * inv_std);
  }
  return x;
}

/// Mean and standard deviation over every value of every map.
inline std::pair<double, double> feature_stats(std::span<const FeatureMap> maps) {
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (const auto &m : maps)
    for (float v : m.values) {
      sum += v;
      sq += static_cast<double>(v) * v;
      ++n;
    }
  if (n == 0) detail::fail(ErrorCode::kInsufficientData, "feature_stats of no data");
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(sq / static_cast<double>(n) - mean * mean, 0.0);
  return {mean, var > 0 ? std::sqrt(var) : 1.0};
}

template <typename T>
struct HeadActivations {
  Tensor<T> hidden_pre, hidden;  // empty at depth 1
  Tensor<T> logits;              // [B x out]
};

/// Everything forward() computes, kept for backward() and for inspection.
template <typename T>
struct ForwardPass {
  HeadKind kind = HeadKind::kSr;
  Tensor<T> input;       // [B x T x F]
  Tensor<T> conv_pre;    // [B x T' x C]
  Tensor<T> conv;        // relu(conv_pre)
  Tensor<T> pooled;      // [B x C]
  Tensor<T> embed_pre;   // [B x E]
  Tensor<T> embedding;   // relu(embed_pre)
  std::array<HeadActivations<T>, 3> heads;  // SR: cls, kw, sp. Baseline: heads[0].

  std::size_t batch() const { return input.dim(0); }

  // Accessors for the SR branch logits. kw/sp are [B x 1].
  const Tensor<T> &cls_logits() const { return heads[kCls].logits; }
  const Tensor<T> &kw_logits() const { return heads[kKw].logits; }
  const Tensor<T> &sp_logits() const { return heads[kSp].logits; }
  const Tensor<T> &baseline_logits() const { return heads[0].logits; }
};

namespace detail {

template <typename T>
void head_forward(const ParamStore<T> &p, const std::string &prefix, int depth, const Tensor<T> &in,
                  HeadActivations<T> &act) {
  if (depth == 2) {
    dense_forward(in, p.value(prefix + ".fc1.w"), p.value(prefix + ".fc1.b"), act.hidden_pre);
    relu_forward(act.hidden_pre, act.hidden);
    dense_forward(act.hidden, p.value(prefix + ".out.w"), p.value(prefix + ".out.b"), act.logits);
  } else {
    dense_forward(in, p.value(prefix + ".out.w"), p.value(prefix + ".out.b"), act.logits);
  }
}

/// Accumulates head parameter gradients and adds the input gradient to d_in.
template <typename T>
void head_backward(ParamStore<T> &p, const std::string &prefix, int depth, const Tensor<T> &in,
                   const HeadActivations<T> &act, const Tensor<T> &d_logits, Tensor<T> &d_in) {
  Tensor<T> d_input;
  if (depth == 2) {
    Param<T> &out = p.at(prefix + ".out.w");
    Tensor<T> d_hidden, d_hidden_pre;
    dense_backward(act.hidden, out.value, d_logits, out.grad, p.grad(prefix + ".out.b"), &d_hidden);
    relu_backward(act.hidden, d_hidden, d_hidden_pre);
    Param<T> &fc1 = p.at(prefix + ".fc1.w");
    dense_backward(in, fc1.value, d_hidden_pre, fc1.grad, p.grad(prefix + ".fc1.b"), &d_input);
  } else {
    Param<T> &out = p.at(prefix + ".out.w");
    dense_backward(in, out.value, d_logits, out.grad, p.grad(prefix + ".out.b"), &d_input);
  }
  for (std::size_t i = 0; i < d_in.size(); ++i) d_in[i] += d_input[i];
}

template <typename T>
void backbone_forward(const ParamStore<T> &p, ForwardPass<T> &fp) {
  conv1d_time_forward(fp.input, p.value("backbone.conv.w"), p.value("backbone.conv.b"), fp.conv_pre);
  relu_forward(fp.conv_pre, fp.conv);
  mean_pool_time_forward(fp.conv, fp.pooled);
  dense_forward(fp.pooled, p.value("backbone.fc.w"), p.value("backbone.fc.b"), fp.embed_pre);
  relu_forward(fp.embed_pre, fp.embedding);
}

template <typename T>
void backbone_backward(ParamStore<T> &p, const ForwardPass<T> &fp, const Tensor<T> &d_embedding) {
  Tensor<T> d_pre, d_pooled, d_conv, d_conv_pre;
  relu_backward(fp.embedding, d_embedding, d_pre);
  Param<T> &fc = p.at("backbone.fc.w");
  dense_backward(fp.pooled, fc.value, d_pre, fc.grad, p.grad("backbone.fc.b"), &d_pooled);
  mean_pool_time_backward(fp.conv.shape(), d_pooled, d_conv);
  relu_backward(fp.conv, d_conv, d_conv_pre);
  Param<T> &conv = p.at("backbone.conv.w");
  conv1d_time_backward<T>(fp.input, conv.value, d_conv_pre, conv.grad, p.grad("backbone.conv.b"),
                          nullptr);
}

}  // namespace detail

/// Runs the backbone and all three branches for every sample. Masking by
/// label happens later, in the loss.
template <typename T>
ForwardPass<T> forward_sr(const ParamStore<T> &params, const ModelConfig &cfg, Tensor<T> input) {
  if (cfg.head != HeadKind::kSr) detail::fail(ErrorCode::kConfigMismatch, "forward_sr on a baseline model");
  require_shape(input, {input.rank() ? input.dim(0) : 0, cfg.frames, cfg.bins}, "forward_sr input");
  ForwardPass<T> fp;
  fp.kind = HeadKind::kSr;
  fp.input = std::move(input);
  detail::backbone_forward(params, fp);
  for (std::size_t br = 0; br < 3; ++br)
    detail::head_forward(params, std::string(kBranchNames[br]), cfg.depth, fp.embedding, fp.heads[br]);
  return fp;
}

/// Gradients w.r.t. the three logit blocks ([B x N], [B x 1], [B x 1]).
/// Each branch's parameters see only their own block; the backbone sees all.
template <typename T>
void backward_sr(ParamStore<T> &params, const ModelConfig &cfg, const ForwardPass<T> &fp,
                 const Tensor<T> &d_cls, const Tensor<T> &d_kw, const Tensor<T> &d_sp) {
  Tensor<T> d_embedding(fp.embedding.shape());
  const std::array<const Tensor<T> *, 3> d = {&d_cls, &d_kw, &d_sp};
  for (std::size_t br = 0; br < 3; ++br)
    detail::head_backward(params, std::string(kBranchNames[br]), cfg.depth, fp.embedding,
                          fp.heads[br], *d[br], d_embedding);
  detail::backbone_backward(params, fp, d_embedding);
}

template <typename T>
ForwardPass<T> forward_baseline(const ParamStore<T> &params, const ModelConfig &cfg,
                                Tensor<T> input) {
  if (cfg.head != HeadKind::kBaseline)
    detail::fail(ErrorCode::kConfigMismatch, "forward_baseline on an SR model");
  require_shape(input, {input.rank() ? input.dim(0) : 0, cfg.frames, cfg.bins},
                "forward_baseline input");
  ForwardPass<T> fp;
  fp.kind = HeadKind::kBaseline;
  fp.input = std::move(input);
  detail::backbone_forward(params, fp);
  detail::head_forward(params, "head", cfg.depth, fp.embedding, fp.heads[0]);
  return fp;
}

template <typename T>
void backward_baseline(ParamStore<T> &params, const ModelConfig &cfg, const ForwardPass<T> &fp,
                       const Tensor<T> &d_logits) {
  Tensor<T> d_embedding(fp.embedding.shape());
  detail::head_backward(params, "head", cfg.depth, fp.embedding, fp.heads[0], d_logits, d_embedding);
  detail::backbone_backward(params, fp, d_embedding);
}

template <typename T>
ForwardPass<T> forward(const ParamStore<T> &params, const ModelConfig &cfg, Tensor<T> input) {
  return cfg.head == HeadKind::kSr ? forward_sr(params, cfg, std::move(input))
                                   : forward_baseline(params, cfg, std::move(input));
}

}  // namespace srkws

#endif  // SRKWS_MODEL_HPP_
