// include/srkws/evaluate.hpp

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

#ifndef SRKWS_EVALUATE_HPP_
#define SRKWS_EVALUATE_HPP_

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "srkws/feature_set.hpp"
#include "srkws/inference.hpp"
#include "srkws/metrics.hpp"
#include "srkws/model.hpp"

namespace srkws {

struct Evaluation {
  HeadKind kind = HeadKind::kSr;
  ConfusionMatrix confusion;
  MetricsReport metrics;
  std::vector<Classification> outputs;
  std::vector<double> ks;          // over negatives only
  std::optional<KsCurve> ks_curve; // absent without negatives
  std::size_t n_params = 0;
};

inline std::vector<double> ks_scores(HeadKind kind, std::span<const Classification> outputs,
                                     std::span<const HierLabel> labels) {
  std::vector<BranchProbs> sr;
  std::vector<CombinedDist> flat;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (!labels[i].is_negative()) continue;
    if (kind == HeadKind::kSr) sr.push_back(*outputs[i].branches);
    else flat.push_back(outputs[i].dist);
  }
  return kind == HeadKind::kSr ? ks_scores_sr(sr) : ks_scores_baseline(flat);
}

template <typename T>
Evaluation evaluate_model(const ParamStore<T> &params, const ModelConfig &cfg, const FeatureSet &data,
                          std::size_t grid_size = 101, std::size_t batch_size = 100) {
  Evaluation ev;
  ev.kind = cfg.head;
  ev.n_params = params.num_values();
  auto ptrs = data.pointers();
  ev.outputs = classify<T>(params, cfg, ptrs, batch_size);
  std::vector<Decision> decisions;
  for (const auto &c : ev.outputs) decisions.push_back(c.decision);
  ev.confusion = confusion(data.labels, decisions, cfg.n_keywords);
  ev.metrics = metrics(ev.confusion);
  ev.ks = ks_scores(cfg.head, ev.outputs, data.labels);
  if (!ev.ks.empty()) ev.ks_curve = inverse_cdf(ev.ks, grid_size);
  return ev;
}

/// FA over an out-of-domain negative set (every sample must be negative).
template <typename T>
double fa_on_negatives(const ParamStore<T> &params, const ModelConfig &cfg, const FeatureSet &negatives) {
  for (const auto &l : negatives.labels)
    if (!l.is_negative()) detail::fail(ErrorCode::kInvalidArgument, "OOD set contains a keyword sample");
  auto ptrs = negatives.pointers();
  auto out = classify<T>(params, cfg, ptrs);
  std::vector<Decision> decisions;
  for (const auto &c : out) decisions.push_back(c.decision);
  return metrics(confusion(negatives.labels, decisions, cfg.n_keywords)).require_fa();
}

struct MetricsRow {
  std::string model_kind;
  double accuracy = 0.0;
  double weighted_f1 = 0.0;
  std::optional<double> fa;
  std::optional<double> fa_ood;
  std::size_t n_params = 0;
};

namespace detail {

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_optional(const std::optional<double> &v) {
  return v ? format_number(*v) : std::string("NA");
}

}  // namespace detail

inline void write_metrics_csv(std::ostream &os, std::span<const MetricsRow> rows) {
  os << "model_kind,accuracy,weighted_f1,fa,fa_ood,n_params\n";
  for (const auto &r : rows)
    os << r.model_kind << ',' << detail::format_number(r.accuracy) << ','
       << detail::format_number(r.weighted_f1) << ',' << detail::format_optional(r.fa) << ','
       << detail::format_optional(r.fa_ood) << ',' << r.n_params << '\n';
}

/// alpha, fraction_ge_alpha_sr, fraction_ge_alpha_baseline. A missing curve
/// leaves its column as NA. Present curves must share one grid.
inline void write_ks_csv(std::ostream &os, const std::optional<KsCurve> &sr,
                         const std::optional<KsCurve> &baseline) {
  const KsCurve *grid = sr ? &*sr : baseline ? &*baseline : nullptr;
  if (sr && baseline && sr->alpha != baseline->alpha)
    detail::fail(ErrorCode::kInvalidArgument, "KS curves use different alpha grids");
  os << "alpha,fraction_ge_alpha_sr,fraction_ge_alpha_baseline\n";
  if (!grid) return;
  for (std::size_t j = 0; j < grid->alpha.size(); ++j)
    os << detail::format_number(grid->alpha[j]) << ','
       << (sr ? detail::format_number(sr->value[j]) : "NA") << ','
       << (baseline ? detail::format_number(baseline->value[j]) : "NA") << '\n';
}

}  // namespace srkws

#endif  // SRKWS_EVALUATE_HPP_
