// include/srkws/inference.hpp

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

#ifndef SRKWS_INFERENCE_HPP_
#define SRKWS_INFERENCE_HPP_

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "srkws/error.hpp"
#include "srkws/hier_label.hpp"
#include "srkws/layers.hpp"
#include "srkws/model.hpp"

namespace srkws {

/// Branch outputs for one clip: p(c_n | K=1, S=1, x), p(K=1 | S=1, x) and
/// p(S=1 | x).
struct BranchProbs {
  std::vector<double> p_c;
  double p_k1 = 0.0;
  double p_s1 = 0.0;
};

inline bool is_valid(const BranchProbs &bp, double tol = 1e-9) {
  if (bp.p_c.empty()) return false;
  double sum = 0.0;
  for (double p : bp.p_c) {
    if (!(p >= 0.0)) return false;
    sum += p;
  }
  return std::fabs(sum - 1.0) <= tol && bp.p_k1 >= 0.0 && bp.p_k1 <= 1.0 && bp.p_s1 >= 0.0 &&
         bp.p_s1 <= 1.0;
}

/// (N+2)-way distribution, laid out as [keyword 0..N-1, non-keyword speech,
/// non-speech].
struct CombinedDist {
  std::vector<double> p;

  std::size_t n_keywords() const { return p.size() - 2; }
};

struct Decision {
  std::size_t label = 0;  // 1-based position in the combined distribution
  LabelKind kind = LabelKind::kNonSpeech;
  std::optional<std::size_t> keyword;  // 0-based keyword index

  bool is_keyword() const { return kind == LabelKind::kKeyword; }
  /// 0-based flat class index, as used by confusion matrices.
  std::size_t class_index() const { return label - 1; }

  bool operator==(const Decision &) const = default;
};

inline BranchProbs branch_probs(std::span<const double> cls_logits, double kw_logit, double sp_logit) {
  BranchProbs bp;
  bp.p_c.resize(cls_logits.size());
  softmax_rows(cls_logits.data(), bp.p_c.data(), cls_logits.size());
  bp.p_k1 = sigmoid(kw_logit);
  bp.p_s1 = sigmoid(sp_logit);
  return bp;
}

/// p = [p_c * pK1 * pS1 ..., (1 - pK1) pS1, 1 - pS1].
inline CombinedDist combine(const BranchProbs &bp) {
  if (!is_valid(bp)) detail::fail(ErrorCode::kInvalidArgument, "combine: invalid branch probabilities");
  CombinedDist d;
  const double ks = bp.p_k1 * bp.p_s1;
  d.p.reserve(bp.p_c.size() + 2);
  for (double pc : bp.p_c) d.p.push_back(pc * ks);
  d.p.push_back((1.0 - bp.p_k1) * bp.p_s1);
  d.p.push_back(1.0 - bp.p_s1);
  return d;
}

/// Argmax over the flat distribution. Exact ties go to the largest index,
/// so a tie can never produce a keyword over a negative class.
inline Decision decide_index(std::span<const double> p) {
  if (p.size() < 3) detail::fail(ErrorCode::kInvalidArgument, "decision needs N+2 >= 3 entries");
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i] >= p[best]) best = i;
  const std::size_t n = p.size() - 2;
  Decision d;
  d.label = best + 1;
  if (best < n) {
    d.kind = LabelKind::kKeyword;
    d.keyword = best;
  } else {
    d.kind = best == n ? LabelKind::kNonKeywordSpeech : LabelKind::kNonSpeech;
  }
  return d;
}

inline Decision decide(const CombinedDist &d) { return decide_index(d.p); }

/// Softmax over the baseline's N+2 logits, returned as a distribution.
inline CombinedDist baseline_dist(std::span<const double> logits) {
  CombinedDist d;
  d.p.resize(logits.size());
  softmax_rows(logits.data(), d.p.data(), logits.size());
  return d;
}

inline Decision decide_baseline(std::span<const double> logits) {
  return decide(baseline_dist(logits));
}

/// Per-clip outputs of either head kind.
struct Classification {
  CombinedDist dist;
  Decision decision;
  std::optional<BranchProbs> branches;  // SR models only
};

/// Runs a forward pass (already computed) through the decision rule.
template <typename T>
std::vector<Classification> classify_pass(const ForwardPass<T> &fp) {
  const std::size_t B = fp.batch();
  std::vector<Classification> out(B);
  for (std::size_t i = 0; i < B; ++i) {
    if (fp.kind == HeadKind::kSr) {
      const std::size_t N = fp.cls_logits().dim(1);
      std::vector<double> row(fp.cls_logits().data() + i * N, fp.cls_logits().data() + (i + 1) * N);
      BranchProbs bp = branch_probs(row, static_cast<double>(fp.kw_logits()[i]),
                                    static_cast<double>(fp.sp_logits()[i]));
      out[i].dist = combine(bp);
      out[i].branches = std::move(bp);
    } else {
      const std::size_t C = fp.baseline_logits().dim(1);
      std::vector<double> row(fp.baseline_logits().data() + i * C,
                              fp.baseline_logits().data() + (i + 1) * C);
      out[i].dist = baseline_dist(row);
    }
    out[i].decision = decide(out[i].dist);
  }
  return out;
}

/// Classifies feature maps in batches of at most `batch_size`.
template <typename T>
std::vector<Classification> classify(const ParamStore<T> &params, const ModelConfig &cfg,
                                     std::span<const FeatureMap *const> maps,
                                     std::size_t batch_size = 100) {
  std::vector<Classification> out;
  out.reserve(maps.size());
  for (std::size_t start = 0; start < maps.size(); start += batch_size) {
    const std::size_t n = std::min(batch_size, maps.size() - start);
    auto fp = forward(params, cfg, make_batch<T>(maps.subspan(start, n), cfg));
    auto part = classify_pass(fp);
    for (auto &c : part) out.push_back(std::move(c));
  }
  return out;
}

}  // namespace srkws

#endif  // SRKWS_INFERENCE_HPP_
