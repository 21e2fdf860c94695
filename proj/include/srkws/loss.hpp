// include/srkws/loss.hpp

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

#ifndef SRKWS_LOSS_HPP_
#define SRKWS_LOSS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "srkws/error.hpp"
#include "srkws/hier_label.hpp"
#include "srkws/layers.hpp"
#include "srkws/tensor.hpp"

namespace srkws {

inline constexpr double kProbClamp = 1e-7;

inline double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

struct LossConfig {
  double lambda1 = 1.0;  // keyword-like branch
  double lambda2 = 1.0;  // speech branch
  double gamma = 2.0;    // focal exponent
  std::vector<double> class_weights_cls;             // N keyword classes
  std::array<double, 2> class_weights_kw = {1, 1};   // {non-keyword speech, keyword}
  std::array<double, 2> class_weights_sp = {1, 1};   // {non-speech, speech}
  std::vector<double> class_weights_flat;            // N+2 classes, baseline head

  /// Unit weights for a model with `n_keywords` keywords.
  static LossConfig uniform(std::size_t n_keywords) {
    LossConfig cfg;
    cfg.class_weights_cls.assign(n_keywords, 1.0);
    cfg.class_weights_flat.assign(n_keywords + 2, 1.0);
    return cfg;
  }

  void validate(std::size_t n_keywords) const {
    if (!(lambda1 >= 0 && lambda2 >= 0))
      detail::fail(ErrorCode::kInvalidArgument, "lambda1/lambda2 must be >= 0");
    if (!(gamma >= 0)) detail::fail(ErrorCode::kInvalidArgument, "focal gamma must be >= 0");
    if (class_weights_cls.size() != n_keywords)
      detail::fail(ErrorCode::kInvalidArgument, "class_weights_cls has ", class_weights_cls.size(),
                   " entries, expected ", n_keywords);
    if (class_weights_flat.size() != n_keywords + 2)
      detail::fail(ErrorCode::kInvalidArgument, "class_weights_flat has ", class_weights_flat.size(),
                   " entries, expected ", n_keywords + 2);
    auto positive = [](double w) { return w > 0 && std::isfinite(w); };
    if (!std::all_of(class_weights_cls.begin(), class_weights_cls.end(), positive) ||
        !std::all_of(class_weights_flat.begin(), class_weights_flat.end(), positive) ||
        !positive(class_weights_kw[0]) || !positive(class_weights_kw[1]) ||
        !positive(class_weights_sp[0]) || !positive(class_weights_sp[1]))
      detail::fail(ErrorCode::kInvalidArgument, "class weights must be positive");
  }
};

/// Weights inversely proportional to class counts, scaled to mean 1.
inline std::vector<double> class_weights_from_counts(std::span<const std::size_t> counts) {
  if (counts.empty()) detail::fail(ErrorCode::kInvalidArgument, "no class counts");
  std::vector<double> w(counts.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) detail::fail(ErrorCode::kInvalidArgument, "class ", i, " has zero samples");
    w[i] = 1.0 / static_cast<double>(counts[i]);
    sum += w[i];
  }
  const double mean = sum / static_cast<double>(counts.size());
  for (double &x : w) x /= mean;
  return w;
}

/// Per-branch inverse-count weights from training labels. The speech branch
/// pools every speech clip into one class; the keyword branch pools all
/// keywords and only counts speech clips.
inline LossConfig loss_config_from_labels(std::span<const HierLabel> labels, std::size_t n_keywords,
                                          double lambda1, double lambda2, double gamma) {
  std::vector<std::size_t> cls(n_keywords, 0), flat(n_keywords + 2, 0);
  std::array<std::size_t, 2> kw = {0, 0}, sp = {0, 0};
  for (const HierLabel &l : labels) {
    validate(l, n_keywords);
    ++flat[class_index(l, n_keywords)];
    ++sp[l.s ? 1 : 0];
    if (l.s) ++kw[l.is_keyword() ? 1 : 0];
    if (l.c) ++cls[*l.c];
  }
  LossConfig cfg;
  cfg.lambda1 = lambda1;
  cfg.lambda2 = lambda2;
  cfg.gamma = gamma;
  cfg.class_weights_cls = class_weights_from_counts(cls);
  cfg.class_weights_flat = class_weights_from_counts(flat);
  auto kw_w = class_weights_from_counts(kw);
  auto sp_w = class_weights_from_counts(sp);
  cfg.class_weights_kw = {kw_w[0], kw_w[1]};
  cfg.class_weights_sp = {sp_w[0], sp_w[1]};
  return cfg;
}

// ---------------------------------------------------------------------------
// Per-sample terms

/// -w[target] * ln softmax(logits)[target]. If `grad` is non-empty it
/// receives d loss / d logits = w[target] * (softmax - onehot).
template <typename T>
double softmax_ce(std::span<const T> logits, std::size_t target, std::span<const double> weights,
                  std::span<T> grad = {}) {
  const std::size_t n = logits.size();
  if (target >= n)
    detail::fail(ErrorCode::kInvalidArgument, "softmax_ce target ", target, " out of range (", n, ")");
  if (weights.size() != n)
    detail::fail(ErrorCode::kInvalidArgument, "softmax_ce: ", weights.size(), " weights for ", n,
                 " classes");
  double mx = static_cast<double>(logits[0]);
  for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, static_cast<double>(logits[j]));
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) sum += std::exp(static_cast<double>(logits[j]) - mx);
  const double log_z = mx + std::log(sum);
  const double w = weights[target];
  const double loss = -w * (static_cast<double>(logits[target]) - log_z);
  if (!grad.empty()) {
    for (std::size_t j = 0; j < n; ++j) {
      double p = std::exp(static_cast<double>(logits[j]) - log_z);
      grad[j] = static_cast<T>(w * (p - (j == target ? 1.0 : 0.0)));
    }
  }
  return loss;
}

struct FocalTerm {
  double loss = 0.0;
  double d_logit = 0.0;  // d loss / d z, where p = sigmoid(z)
};

/// Weighted focal loss -a_t (1 - p_t)^gamma ln p_t for a binary target.
/// `p` is the probability of class 1; weights are {class 0, class 1}.
/// p_t is clamped to [1e-7, 1 - 1e-7]; the gradient is evaluated at the
/// clamped point rather than zeroed, so saturated mistakes still learn.
inline FocalTerm focal_binary(double p, int y, double gamma, std::array<double, 2> weights) {
  const double pt = clamp_prob(y == 1 ? p : 1.0 - p);
  const double alpha = weights[y == 1 ? 1 : 0];
  const double q = 1.0 - pt;
  const double log_pt = std::log(pt);
  const double q_gamma = gamma == 0.0 ? 1.0 : std::pow(q, gamma);
  FocalTerm term;
  term.loss = -alpha * q_gamma * log_pt;
  // d loss / d p_t times d p_t / d z = +-p_t (1 - p_t).
  const double d = -alpha * (q_gamma * q - gamma * q_gamma * pt * log_pt);
  term.d_logit = y == 1 ? d : -d;
  return term;
}

inline FocalTerm focal_binary_logit(double logit, int y, double gamma, std::array<double, 2> weights) {
  return focal_binary(sigmoid(logit), y, gamma, weights);
}

// ---------------------------------------------------------------------------
// Hierarchical masking

struct BatchMask {
  std::vector<bool> speech;   // s = 1
  std::vector<bool> keyword;  // k = 1 (subset of speech)
  std::vector<std::optional<std::size_t>> cls_targets;  // defined exactly on keyword

  std::size_t size() const { return speech.size(); }
  std::size_t num_speech() const { return static_cast<std::size_t>(std::count(speech.begin(), speech.end(), true)); }
  std::size_t num_keyword() const { return static_cast<std::size_t>(std::count(keyword.begin(), keyword.end(), true)); }
};

inline BatchMask build_mask(std::span<const HierLabel> labels) {
  BatchMask m;
  m.speech.reserve(labels.size());
  for (const HierLabel &l : labels) {
    m.speech.push_back(l.s);
    m.keyword.push_back(l.is_keyword());
    m.cls_targets.push_back(l.is_keyword() ? l.c : std::nullopt);
  }
  return m;
}

template <typename T>
struct CombinedLoss {
  double total = 0.0;
  double cls = 0.0;  // mean softmax CE over keyword samples
  double kw = 0.0;   // mean focal over speech samples
  double sp = 0.0;   // mean focal over all samples
  Tensor<T> d_cls, d_kw, d_sp;
};

/// L = CE_cls + lambda1 * focal_kw + lambda2 * focal_sp, each term a mean
/// over its own mask. An empty mask contributes 0 and a zero gradient. The
/// gradient of each logit block comes from its own term only.
template <typename T>
CombinedLoss<T> combined_loss(const Tensor<T> &cls_logits, const Tensor<T> &kw_logits,
                              const Tensor<T> &sp_logits, const BatchMask &mask,
                              const LossConfig &cfg) {
  const std::size_t B = mask.size();
  const std::size_t N = cls_logits.rank() == 2 ? cls_logits.dim(1) : 0;
  require_shape(cls_logits, {B, N}, "combined_loss cls_logits");
  require_shape(kw_logits, {B, 1}, "combined_loss kw_logits");
  require_shape(sp_logits, {B, 1}, "combined_loss sp_logits");
  cfg.validate(N);

  CombinedLoss<T> out;
  out.d_cls.reset({B, N});
  out.d_kw.reset({B, 1});
  out.d_sp.reset({B, 1});

  const std::size_t n_kw = mask.num_keyword(), n_sp = mask.num_speech();
  for (std::size_t i = 0; i < B; ++i) {
    if (mask.keyword[i]) {
      std::span<const T> row(cls_logits.data() + i * N, N);
      std::span<T> grow(out.d_cls.data() + i * N, N);
      out.cls += softmax_ce<T>(row, *mask.cls_targets[i], cfg.class_weights_cls, grow);
      for (auto &g : grow) g = static_cast<T>(static_cast<double>(g) / static_cast<double>(n_kw));
    }
    if (mask.speech[i]) {
      FocalTerm f = focal_binary_logit(static_cast<double>(kw_logits[i]), mask.keyword[i] ? 1 : 0,
                                       cfg.gamma, cfg.class_weights_kw);
      out.kw += f.loss;
      out.d_kw[i] = static_cast<T>(cfg.lambda1 * f.d_logit / static_cast<double>(n_sp));
    }
    FocalTerm f = focal_binary_logit(static_cast<double>(sp_logits[i]), mask.speech[i] ? 1 : 0,
                                     cfg.gamma, cfg.class_weights_sp);
    out.sp += f.loss;
    out.d_sp[i] = static_cast<T>(cfg.lambda2 * f.d_logit / static_cast<double>(B));
  }
  if (n_kw) out.cls /= static_cast<double>(n_kw);
  if (n_sp) out.kw /= static_cast<double>(n_sp);
  if (B) out.sp /= static_cast<double>(B);
  out.total = out.cls + cfg.lambda1 * out.kw + cfg.lambda2 * out.sp;
  return out;
}

template <typename T>
struct FlatLoss {
  double total = 0.0;
  Tensor<T> d_logits;
};

/// Baseline objective: mean over the batch of weighted (N+2)-way softmax CE.
template <typename T>
FlatLoss<T> baseline_loss(const Tensor<T> &logits, std::span<const HierLabel> labels,
                          const LossConfig &cfg) {
  const std::size_t B = labels.size();
  const std::size_t C = logits.rank() == 2 ? logits.dim(1) : 0;
  require_shape(logits, {B, C}, "baseline_loss logits");
  if (C < 3) detail::fail(ErrorCode::kShapeMismatch, "baseline logits need N+2 >= 3 columns");
  cfg.validate(C - 2);
  FlatLoss<T> out;
  out.d_logits.reset({B, C});
  for (std::size_t i = 0; i < B; ++i) {
    std::span<const T> row(logits.data() + i * C, C);
    std::span<T> grow(out.d_logits.data() + i * C, C);
    out.total += softmax_ce<T>(row, class_index(labels[i], C - 2), cfg.class_weights_flat, grow);
    for (auto &g : grow) g = static_cast<T>(static_cast<double>(g) / static_cast<double>(B));
  }
  if (B) out.total /= static_cast<double>(B);
  return out;
}

}  // namespace srkws

#endif  // SRKWS_LOSS_HPP_
