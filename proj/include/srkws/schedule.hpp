// include/srkws/schedule.hpp

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

#ifndef SRKWS_SCHEDULE_HPP_
#define SRKWS_SCHEDULE_HPP_

#include <cmath>
#include <cstddef>
#include <numbers>

#include "srkws/error.hpp"

namespace srkws {

struct OneCycleConfig {
  double lr_init = 0.004;
  double lr_peak = 0.1;
  double lr_final = 4e-6;
  std::size_t warmup_epochs = 7;
  std::size_t total_epochs = 25;
  double momentum_low = 0.85;
  double momentum_high = 0.95;
  std::size_t steps_per_epoch = 1;

  std::size_t warmup_steps() const { return warmup_epochs * steps_per_epoch; }
  std::size_t total_steps() const { return total_epochs * steps_per_epoch; }

  void validate() const {
    if (!(0 < lr_init && lr_init < lr_peak))
      detail::fail(ErrorCode::kInvalidArgument, "need 0 < lr_init < lr_peak");
    if (!(lr_final < lr_init)) detail::fail(ErrorCode::kInvalidArgument, "need lr_final < lr_init");
    if (!(0 < warmup_epochs && warmup_epochs < total_epochs))
      detail::fail(ErrorCode::kInvalidArgument, "need 0 < warmup_epochs < total_epochs");
    if (!(0 <= momentum_low && momentum_low <= momentum_high && momentum_high < 1))
      detail::fail(ErrorCode::kInvalidArgument, "need 0 <= momentum_low <= momentum_high < 1");
    if (steps_per_epoch == 0) detail::fail(ErrorCode::kInvalidArgument, "steps_per_epoch must be > 0");
  }
};

struct ScheduleValue {
  double lr;
  double momentum;
};

/// One-cycle policy. Warm-up: lr rises linearly lr_init -> lr_peak while
/// momentum falls linearly high -> low, reaching both at step warmup_steps.
/// Annealing: lr follows a half cosine lr_peak -> lr_final over the remaining
/// steps and momentum climbs linearly back to high. The last step
/// (total_steps - 1) lands exactly on lr_final / momentum_high.
inline ScheduleValue one_cycle(std::size_t step, const OneCycleConfig &cfg) {
  cfg.validate();
  const std::size_t total = cfg.total_steps(), warm = cfg.warmup_steps();
  if (step >= total)
    detail::fail(ErrorCode::kInvalidArgument, "schedule step ", step, " outside [0, ", total, ")");
  if (step <= warm) {
    const double t = static_cast<double>(step) / static_cast<double>(warm);
    return {std::lerp(cfg.lr_init, cfg.lr_peak, t), std::lerp(cfg.momentum_high, cfg.momentum_low, t)};
  }
  const std::size_t span = total - 1 - warm;  // >= 1 here, since warm < step <= total - 1
  const double t = static_cast<double>(step - warm) / static_cast<double>(span);
  const double cos_w = 0.5 * (1.0 + std::cos(std::numbers::pi * t));
  const double lr = t >= 1.0 ? cfg.lr_final : cfg.lr_final + (cfg.lr_peak - cfg.lr_final) * cos_w;
  return {lr, std::lerp(cfg.momentum_low, cfg.momentum_high, t)};
}

}  // namespace srkws

#endif  // SRKWS_SCHEDULE_HPP_
