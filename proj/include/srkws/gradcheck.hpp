// include/srkws/gradcheck.hpp

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

#ifndef SRKWS_GRADCHECK_HPP_
#define SRKWS_GRADCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "srkws/tensor.hpp"

namespace srkws {

struct GradCheckEntry {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double analytic = 0.0;  // at worst_index
  double numeric = 0.0;
  bool ok = true;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0.0;
  bool ok = true;
};

/// Relative error with a small absolute floor, so entries whose true
/// gradient is ~0 are judged on absolute difference instead of blowing up.
inline double grad_rel_error(double analytic, double numeric, double floor = 1e-6) {
  double denom = std::max({std::fabs(analytic), std::fabs(numeric), floor});
  return std::fabs(analytic - numeric) / denom;
}

/// Compares analytic gradients against central differences with step `h`.
///
/// `loss_fn(params)` must return the scalar loss and accumulate analytic
/// gradients into `params` (the checker zeroes them before each call).
template <typename LossFn>
GradCheckReport finite_diff_check(LossFn &&loss_fn, ParamStore<double> &params, double tolerance,
                                  double h = 1e-5) {
  auto eval = [&](const char *what) {
    params.zero_grad();
    double loss = loss_fn(params);
    if (!std::isfinite(loss)) detail::fail(ErrorCode::kNonFinite, "loss is ", loss, " (", what, ")");
    return loss;
  };

  eval("base point");
  std::map<std::string, Tensor<double>> analytic;
  for (auto &[name, p] : params) analytic.emplace(name, p.grad);

  GradCheckReport report;
  for (auto &[name, p] : params) {
    GradCheckEntry entry;
    entry.name = name;
    const Tensor<double> &ag = analytic.at(name);
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double orig = p.value[i];
      p.value[i] = orig + h;
      const double up = eval("perturbed up");
      p.value[i] = orig - h;
      const double down = eval("perturbed down");
      p.value[i] = orig;
      const double numeric = (up - down) / (2.0 * h);
      const double err = grad_rel_error(ag[i], numeric);
      if (err > entry.max_rel_error || i == 0) {
        entry.max_rel_error = err;
        entry.worst_index = i;
        entry.analytic = ag[i];
        entry.numeric = numeric;
      }
    }
    entry.ok = entry.max_rel_error < tolerance;
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.ok = report.ok && entry.ok;
    report.entries.push_back(entry);
  }
  // Leave the analytic gradients in place for callers that inspect them.
  for (auto &[name, p] : params) p.grad = analytic.at(name);
  return report;
}

}  // namespace srkws

#endif  // SRKWS_GRADCHECK_HPP_
