// include/srkws/metrics.hpp

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

#ifndef SRKWS_METRICS_HPP_
#define SRKWS_METRICS_HPP_

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "srkws/error.hpp"
#include "srkws/hier_label.hpp"
#include "srkws/inference.hpp"

namespace srkws {

/// (N+2) x (N+2) counts; rows are truth, columns prediction.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t n_classes = 0) : n_(n_classes), counts_(n_classes * n_classes, 0) {}

  std::size_t num_classes() const { return n_; }
  std::size_t n_keywords() const { return n_ - 2; }

  std::size_t &at(std::size_t truth, std::size_t pred) { return counts_[truth * n_ + pred]; }
  std::size_t at(std::size_t truth, std::size_t pred) const { return counts_[truth * n_ + pred]; }

  void add(std::size_t truth, std::size_t pred) {
    if (truth >= n_ || pred >= n_)
      detail::fail(ErrorCode::kInvalidArgument, "confusion index out of range");
    ++at(truth, pred);
  }

  std::size_t total() const {
    std::size_t t = 0;
    for (auto c : counts_) t += c;
    return t;
  }
  std::size_t row_sum(std::size_t truth) const {
    std::size_t t = 0;
    for (std::size_t j = 0; j < n_; ++j) t += at(truth, j);
    return t;
  }
  std::size_t col_sum(std::size_t pred) const {
    std::size_t t = 0;
    for (std::size_t i = 0; i < n_; ++i) t += at(i, pred);
    return t;
  }

  bool operator==(const ConfusionMatrix &) const = default;

 private:
  std::size_t n_;
  std::vector<std::size_t> counts_;
};

inline ConfusionMatrix confusion(std::span<const HierLabel> truths, std::span<const Decision> decisions,
                                 std::size_t n_keywords) {
  if (truths.size() != decisions.size())
    detail::fail(ErrorCode::kInvalidArgument, "confusion: ", truths.size(), " truths vs ",
                 decisions.size(), " decisions");
  ConfusionMatrix cm(n_keywords + 2);
  for (std::size_t i = 0; i < truths.size(); ++i)
    cm.add(class_index(truths[i], n_keywords), decisions[i].class_index());
  return cm;
}

struct MetricsReport {
  double accuracy = 0.0;
  double weighted_f1 = 0.0;
  std::optional<double> fa;  // absent when there are no negatives
  std::vector<std::size_t> class_counts;

  double require_fa() const {
    if (!fa) detail::fail(ErrorCode::kInsufficientData, "FA undefined: no negative samples");
    return *fa;
  }
};

/// Accuracy, support-weighted F1, and FA = negatives (non-keyword speech or
/// non-speech) predicted as any keyword, over all negatives.
inline MetricsReport metrics(const ConfusionMatrix &cm) {
  const std::size_t total = cm.total(), C = cm.num_classes(), N = cm.n_keywords();
  if (total == 0) detail::fail(ErrorCode::kInsufficientData, "metrics over an empty confusion matrix");
  MetricsReport r;
  std::size_t trace = 0;
  for (std::size_t c = 0; c < C; ++c) {
    const std::size_t tp = cm.at(c, c), support = cm.row_sum(c), predicted = cm.col_sum(c);
    trace += tp;
    r.class_counts.push_back(support);
    if (tp == 0) continue;  // F1 is 0 (or undefined with zero support)
    const double precision = static_cast<double>(tp) / static_cast<double>(predicted);
    const double recall = static_cast<double>(tp) / static_cast<double>(support);
    const double f1 = 2.0 * precision * recall / (precision + recall);
    r.weighted_f1 += static_cast<double>(support) / static_cast<double>(total) * f1;
  }
  r.accuracy = static_cast<double>(trace) / static_cast<double>(total);

  std::size_t negatives = 0, false_alarms = 0;
  for (std::size_t t = N; t < C; ++t) {
    negatives += cm.row_sum(t);
    for (std::size_t p = 0; p < N; ++p) false_alarms += cm.at(t, p);
  }
  if (negatives > 0) r.fa = static_cast<double>(false_alarms) / static_cast<double>(negatives);
  return r;
}

// ---------------------------------------------------------------------------
// KS statistic: the probability mass a model can put on "some keyword".

/// SR models: KS = p(K=1 | S=1, x) p(S=1 | x).
inline std::vector<double> ks_scores_sr(std::span<const BranchProbs> probs) {
  std::vector<double> out;
  out.reserve(probs.size());
  for (const auto &bp : probs) out.push_back(bp.p_k1 * bp.p_s1);
  return out;
}

/// Flat models: KS = total keyword mass of the (N+2)-way distribution.
inline std::vector<double> ks_scores_baseline(std::span<const CombinedDist> dists) {
  std::vector<double> out;
  out.reserve(dists.size());
  for (const auto &d : dists) {
    if (d.p.size() < 3) detail::fail(ErrorCode::kInvalidArgument, "baseline distribution too short");
    double sum = 0.0, kw = 0.0;
    for (std::size_t i = 0; i < d.p.size(); ++i) {
      if (!(d.p[i] >= 0.0)) detail::fail(ErrorCode::kInvalidArgument, "negative probability");
      sum += d.p[i];
      if (i < d.n_keywords()) kw += d.p[i];
    }
    if (std::fabs(sum - 1.0) > 1e-9)
      detail::fail(ErrorCode::kInvalidArgument, "baseline distribution sums to ", sum);
    out.push_back(kw);
  }
  return out;
}

/// Complementary CDF ("inverse CDF") sampled on a uniform alpha grid.
struct KsCurve {
  std::vector<double> alpha;
  std::vector<double> value;  // fraction of scores >= alpha

  /// Value at the grid point nearest to `a`.
  double at(double a) const {
    std::size_t best = 0;
    for (std::size_t j = 1; j < alpha.size(); ++j)
      if (std::fabs(alpha[j] - a) < std::fabs(alpha[best] - a)) best = j;
    return value[best];
  }
};

inline KsCurve inverse_cdf(std::span<const double> scores, std::size_t grid_size = 101) {
  if (scores.empty()) detail::fail(ErrorCode::kInsufficientData, "inverse_cdf of no scores");
  if (grid_size < 2) detail::fail(ErrorCode::kInvalidArgument, "inverse_cdf grid size must be >= 2");
  KsCurve curve;
  for (std::size_t j = 0; j < grid_size; ++j) {
    const double a = static_cast<double>(j) / static_cast<double>(grid_size - 1);
    std::size_t ge = 0;
    for (double s : scores) ge += s >= a ? 1 : 0;
    curve.alpha.push_back(a);
    curve.value.push_back(static_cast<double>(ge) / static_cast<double>(scores.size()));
  }
  return curve;
}

}  // namespace srkws

#endif  // SRKWS_METRICS_HPP_
