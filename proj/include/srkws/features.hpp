// include/srkws/features.hpp

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

#ifndef SRKWS_FEATURES_HPP_
#define SRKWS_FEATURES_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include <fftw3.h>

#include "srkws/error.hpp"

namespace srkws {

struct FeatureConfig {
  int sample_rate = 16000;
  double window_len = 0.030;  // seconds
  double hop_len = 0.010;
  std::size_t n_mels = 40;
  double fmin = 20.0;
  double fmax = 8000.0;
  double log_floor = 1e-6;

  std::size_t window_samples() const {
    return static_cast<std::size_t>(std::llround(window_len * sample_rate));
  }
  std::size_t hop_samples() const {
    return static_cast<std::size_t>(std::llround(hop_len * sample_rate));
  }
  std::size_t fft_size() const {
    std::size_t n = 1;
    while (n < window_samples()) n <<= 1;
    return n;
  }
  std::size_t num_frames(std::size_t n_samples) const {
    if (n_samples < window_samples()) return 0;
    return (n_samples - window_samples()) / hop_samples() + 1;
  }

  void validate() const {
    if (sample_rate <= 0) detail::fail(ErrorCode::kInvalidArgument, "features.sample_rate must be > 0");
    if (!(hop_len > 0 && window_len > hop_len))
      detail::fail(ErrorCode::kInvalidArgument, "need window_len > hop_len > 0");
    if (hop_samples() == 0) detail::fail(ErrorCode::kInvalidArgument, "hop shorter than one sample");
    if (!(fmin >= 0 && fmin < fmax && fmax <= sample_rate / 2.0))
      detail::fail(ErrorCode::kInvalidArgument, "need 0 <= fmin < fmax <= sample_rate/2");
    if (n_mels < 1) detail::fail(ErrorCode::kInvalidArgument, "n_mels must be >= 1");
    if (!(log_floor > 0)) detail::fail(ErrorCode::kInvalidArgument, "log_floor must be > 0");
  }
};

/// Row-major frames x bins matrix of natural-log mel energies.
struct FeatureMap {
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<float> values;

  float at(std::size_t t, std::size_t f) const { return values[t * bins + f]; }
};

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Triangular mel filterbank over the non-negative FFT bins. Rows are mel
/// bands; each is a dense vector of length fft_size/2 + 1.
class MelFilterbank {
 public:
  explicit MelFilterbank(const FeatureConfig &cfg) {
    cfg.validate();
    const std::size_t n_fft = cfg.fft_size();
    n_bins_ = n_fft / 2 + 1;
    const double mlo = hz_to_mel(cfg.fmin), mhi = hz_to_mel(cfg.fmax);
    std::vector<double> edges(cfg.n_mels + 2);
    for (std::size_t i = 0; i < edges.size(); ++i)
      edges[i] = mel_to_hz(mlo + (mhi - mlo) * static_cast<double>(i) / (cfg.n_mels + 1));
    weights_.assign(cfg.n_mels, std::vector<double>(n_bins_, 0.0));
    for (std::size_t m = 0; m < cfg.n_mels; ++m) {
      const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
      for (std::size_t k = 0; k < n_bins_; ++k) {
        double f = static_cast<double>(k) * cfg.sample_rate / static_cast<double>(n_fft);
        double w = 0.0;
        if (f > lo && f <= mid) w = (f - lo) / (mid - lo);
        else if (f > mid && f < hi) w = (hi - f) / (hi - mid);
        weights_[m][k] = w;
      }
    }
  }

  std::size_t num_bands() const { return weights_.size(); }
  std::size_t num_fft_bins() const { return n_bins_; }
  const std::vector<double> &band(std::size_t m) const { return weights_[m]; }

  /// Projects one power spectrum (length num_fft_bins) onto the bands.
  void project(std::span<const double> power, std::span<double> out) const {
    for (std::size_t m = 0; m < weights_.size(); ++m) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n_bins_; ++k) acc += weights_[m][k] * power[k];
      out[m] = acc;
    }
  }

 private:
  std::size_t n_bins_ = 0;
  std::vector<std::vector<double>> weights_;
};

namespace detail {

// FFTW planning is not thread-safe; execution with new-array calls is.
inline std::mutex &fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    double *in = fftw_alloc_real(n);
    fftw_complex *out = fftw_alloc_complex(n / 2 + 1);
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
  }
  ~RealFft() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  RealFft(const RealFft &) = delete;
  RealFft &operator=(const RealFft &) = delete;

  /// `in` must have n_ entries, `out` n_/2+1; both fftw-allocated (aligned).
  void execute(double *in, fftw_complex *out) const { fftw_execute_dft_r2c(plan_, in, out); }

 private:
  std::size_t n_;
  fftw_plan plan_;
};

}  // namespace detail

/// Log-mel front end. Construct once per FeatureConfig; compute() is const
/// and may be called concurrently.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(const FeatureConfig &cfg)
      : cfg_(cfg), fbank_(cfg), fft_(std::make_unique<detail::RealFft>(cfg.fft_size())) {
    const std::size_t w = cfg.window_samples();
    window_.resize(w);
    for (std::size_t i = 0; i < w; ++i)
      window_[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                        static_cast<double>(w));
  }

  const FeatureConfig &config() const { return cfg_; }
  const MelFilterbank &filterbank() const { return fbank_; }

  FeatureMap compute(std::span<const float> signal) const {
    const std::size_t w = cfg_.window_samples(), hop = cfg_.hop_samples();
    if (signal.size() < w)
      detail::fail(ErrorCode::kInvalidArgument, "signal of ", signal.size(),
                   " samples is shorter than one window (", w, ")");
    const std::size_t n_fft = cfg_.fft_size(), n_bins = n_fft / 2 + 1;
    FeatureMap fm;
    fm.frames = cfg_.num_frames(signal.size());
    fm.bins = cfg_.n_mels;
    fm.values.resize(fm.frames * fm.bins);

    double *in = fftw_alloc_real(n_fft);
    fftw_complex *out = fftw_alloc_complex(n_bins);
    std::vector<double> power(n_bins), mel(cfg_.n_mels);
    const double log_floor = cfg_.log_floor;
    for (std::size_t t = 0; t < fm.frames; ++t) {
      const std::size_t off = t * hop;
      for (std::size_t i = 0; i < n_fft; ++i)
        in[i] = i < w ? window_[i] * static_cast<double>(signal[off + i]) : 0.0;
      fft_->execute(in, out);
      for (std::size_t k = 0; k < n_bins; ++k) power[k] = out[k][0] * out[k][0] + out[k][1] * out[k][1];
      fbank_.project(power, mel);
      for (std::size_t m = 0; m < cfg_.n_mels; ++m)
        fm.values[t * fm.bins + m] = static_cast<float>(std::log(mel[m] + log_floor));
    }
    fftw_free(in);
    fftw_free(out);
    return fm;
  }

 private:
  FeatureConfig cfg_;
  MelFilterbank fbank_;
  std::unique_ptr<detail::RealFft> fft_;
  std::vector<double> window_;
};

inline FeatureMap compute_features(std::span<const float> signal, const FeatureConfig &cfg) {
  return FeatureExtractor(cfg).compute(signal);
}

}  // namespace srkws

#endif  // SRKWS_FEATURES_HPP_
