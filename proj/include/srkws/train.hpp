// include/srkws/train.hpp

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

#ifndef SRKWS_TRAIN_HPP_
#define SRKWS_TRAIN_HPP_

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <vector>

#include "srkws/error.hpp"
#include "srkws/feature_set.hpp"
#include "srkws/inference.hpp"
#include "srkws/loss.hpp"
#include "srkws/metrics.hpp"
#include "srkws/model.hpp"
#include "srkws/optim.hpp"
#include "srkws/random.hpp"
#include "srkws/schedule.hpp"

namespace srkws {

struct TrainOptions {
  std::size_t batch_size = 100;
  std::uint64_t seed = 1;
  /// Candidate epochs must reach (best validation accuracy - this).
  double selection_accuracy_margin = 0.01;
};

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = std::numeric_limits<double>::quiet_NaN();
  double val_accuracy = std::numeric_limits<double>::quiet_NaN();
  double val_fa = std::numeric_limits<double>::quiet_NaN();
  double lr = 0.0;  // at the epoch's last step
};

template <typename T>
struct TrainResult {
  ParamStore<T> params;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;  // 1-based
  std::size_t steps = 0;
};

/// Loss of one batch, gradients accumulated into `params`.
template <typename T>
double loss_and_backward(ParamStore<T> &params, const ModelConfig &cfg, const LossConfig &loss_cfg,
                         Tensor<T> input, std::span<const HierLabel> labels, bool backward = true) {
  if (cfg.head == HeadKind::kSr) {
    auto fp = forward_sr(params, cfg, std::move(input));
    auto loss = combined_loss(fp.cls_logits(), fp.kw_logits(), fp.sp_logits(), build_mask(labels), loss_cfg);
    if (backward) backward_sr(params, cfg, fp, loss.d_cls, loss.d_kw, loss.d_sp);
    return loss.total;
  }
  auto fp = forward_baseline(params, cfg, std::move(input));
  auto loss = baseline_loss(fp.baseline_logits(), labels, loss_cfg);
  if (backward) backward_baseline(params, cfg, fp, loss.d_logits);
  return loss.total;
}

struct ValidationResult {
  double loss = 0.0;
  MetricsReport metrics;
};

template <typename T>
ValidationResult validate_epoch(ParamStore<T> &params, const ModelConfig &cfg, const LossConfig &loss_cfg,
                                const FeatureSet &val, std::size_t batch_size) {
  ValidationResult r;
  auto ptrs = val.pointers();
  std::vector<Decision> decisions;
  decisions.reserve(val.size());
  for (std::size_t start = 0; start < val.size(); start += batch_size) {
    const std::size_t n = std::min(batch_size, val.size() - start);
    std::span<const FeatureMap *const> maps(ptrs.data() + start, n);
    std::span<const HierLabel> labels(val.labels.data() + start, n);
    auto fp = forward(params, cfg, make_batch<T>(maps, cfg));
    double loss = cfg.head == HeadKind::kSr
                      ? combined_loss(fp.cls_logits(), fp.kw_logits(), fp.sp_logits(),
                                      build_mask(labels), loss_cfg).total
                      : baseline_loss(fp.baseline_logits(), labels, loss_cfg).total;
    r.loss += loss * static_cast<double>(n);
    for (auto &c : classify_pass(fp)) decisions.push_back(c.decision);
  }
  r.loss /= static_cast<double>(val.size());
  r.metrics = metrics(confusion(val.labels, decisions, cfg.n_keywords));
  return r;
}

/// Epoch chosen for the returned parameters: lowest validation FA among
/// epochs within `margin` of the best validation accuracy; ties go to the
/// higher accuracy, then the earlier epoch. Without validation metrics the
/// last epoch wins.
inline std::size_t select_epoch(std::span<const EpochLog> log, double margin) {
  if (log.empty()) detail::fail(ErrorCode::kInvalidArgument, "no epochs to select from");
  double best_acc = -1.0;
  for (const auto &e : log)
    if (!std::isnan(e.val_accuracy)) best_acc = std::max(best_acc, e.val_accuracy);
  if (best_acc < 0) return log.size() - 1;
  std::size_t pick = log.size();
  for (std::size_t i = 0; i < log.size(); ++i) {
    const auto &e = log[i];
    if (std::isnan(e.val_accuracy) || e.val_accuracy < best_acc - margin - 1e-12) continue;
    const double fa = std::isnan(e.val_fa) ? 0.0 : e.val_fa;
    if (pick == log.size()) {
      pick = i;
      continue;
    }
    const double pick_fa = std::isnan(log[pick].val_fa) ? 0.0 : log[pick].val_fa;
    if (fa < pick_fa || (fa == pick_fa && e.val_accuracy > log[pick].val_accuracy)) pick = i;
  }
  return pick;
}

/// Mini-batch SGD with the one-cycle schedule. `schedule.steps_per_epoch`
/// is overwritten from the data size and batch size. Single-threaded and
/// bit-reproducible for a given seed.
template <typename T>
TrainResult<T> train(const ModelConfig &cfg, const FeatureSet &train_set, const FeatureSet &val_set,
                     const LossConfig &loss_cfg, OneCycleConfig schedule, const TrainOptions &opts,
                     const std::function<void(const EpochLog &)> &on_epoch = {}) {
  cfg.validate();
  loss_cfg.validate(cfg.n_keywords);
  if (opts.batch_size == 0) detail::fail(ErrorCode::kInvalidArgument, "batch size must be > 0");
  bool has_kw = false, has_speech = false, has_noise = false;
  for (const auto &l : train_set.labels) {
    validate(l, cfg.n_keywords);
    has_kw |= l.is_keyword();
    has_speech |= l.kind() == LabelKind::kNonKeywordSpeech;
    has_noise |= !l.s;
  }
  if (!(has_kw && has_speech && has_noise))
    detail::fail(ErrorCode::kInsufficientData,
                 "training data needs keyword, non-keyword speech and non-speech samples");

  const std::size_t n = train_set.size();
  schedule.steps_per_epoch = (n + opts.batch_size - 1) / opts.batch_size;
  schedule.validate();

  TrainResult<T> result;
  ParamStore<T> params = init_model<T>(cfg);
  Sgd<T> opt;
  std::vector<ParamStore<T>> snapshots;
  auto ptrs = train_set.pointers();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix_seed(opts.seed, 0x7a11));

  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= schedule.total_epochs; ++epoch) {
    shuffle(order, rng);
    EpochLog log;
    log.epoch = epoch;
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n; start += opts.batch_size, ++step) {
      const std::size_t b = std::min(opts.batch_size, n - start);
      std::vector<const FeatureMap *> maps(b);
      std::vector<HierLabel> labels(b);
      for (std::size_t i = 0; i < b; ++i) {
        maps[i] = ptrs[order[start + i]];
        labels[i] = train_set.labels[order[start + i]];
      }
      params.zero_grad();
      const double loss = loss_and_backward(params, cfg, loss_cfg, make_batch<T>(maps, cfg), labels);
      if (!std::isfinite(loss))
        detail::fail(ErrorCode::kDivergence, "loss ", loss, " at epoch ", epoch, ", step ", step);
      loss_sum += loss * static_cast<double>(b);
      const ScheduleValue sv = one_cycle(step, schedule);
      try {
        opt.step(params, sv.lr, sv.momentum);
      } catch (const Error &e) {
        detail::fail(ErrorCode::kDivergence, "epoch ", epoch, ", step ", step, ": ", e.what());
      }
      log.lr = sv.lr;
    }
    log.train_loss = loss_sum / static_cast<double>(n);
    if (val_set.size() > 0) {
      ValidationResult v = validate_epoch(params, cfg, loss_cfg, val_set, opts.batch_size);
      log.val_loss = v.loss;
      log.val_accuracy = v.metrics.accuracy;
      if (v.metrics.fa) log.val_fa = *v.metrics.fa;
    }
    result.log.push_back(log);
    snapshots.push_back(params);
    if (on_epoch) on_epoch(log);
  }
  const std::size_t pick = select_epoch(result.log, opts.selection_accuracy_margin);
  result.best_epoch = pick + 1;
  result.params = std::move(snapshots[pick]);
  result.steps = step;
  return result;
}

inline void write_training_log(std::ostream &os, std::span<const EpochLog> log) {
  auto num = [&os](double v) -> std::ostream & {
    if (std::isnan(v)) return os << "NA";
    return os << v;
  };
  auto old = os.precision(17);
  os << "epoch,train_loss,val_loss,val_accuracy,val_FA,lr_at_epoch_end\n";
  for (const auto &e : log) {
    os << e.epoch << ',';
    num(e.train_loss) << ',';
    num(e.val_loss) << ',';
    num(e.val_accuracy) << ',';
    num(e.val_fa) << ',';
    num(e.lr) << '\n';
  }
  os.precision(old);
}

}  // namespace srkws

#endif  // SRKWS_TRAIN_HPP_
