// include/srkws/layers.hpp

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

#ifndef SRKWS_LAYERS_HPP_
#define SRKWS_LAYERS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "srkws/tensor.hpp"

// Forward and backward kernels for the handful of ops the model uses. Every
// backward *accumulates* into parameter gradients and *overwrites* the input
// gradient, so a layer's dx can be passed straight to the layer below.

namespace srkws {

// ---------------------------------------------------------------------------
// dense: y[B x O] = x[B x I] W[I x O] + b[O]

template <typename T>
void dense_forward(const Tensor<T> &x, const Tensor<T> &w, const Tensor<T> &b, Tensor<T> &y) {
  if (x.rank() != 2 || w.rank() != 2 || b.rank() != 1 || x.dim(1) != w.dim(0) || b.dim(0) != w.dim(1))
    detail::fail(ErrorCode::kShapeMismatch, "dense: x ", shape_str(x.shape()), ", W ",
                 shape_str(w.shape()), ", b ", shape_str(b.shape()));
  const std::size_t B = x.dim(0), I = w.dim(0), O = w.dim(1);
  y.reset({B, O});
  for (std::size_t r = 0; r < B; ++r) {
    T *yr = y.data() + r * O;
    for (std::size_t o = 0; o < O; ++o) yr[o] = b[o];
    const T *xr = x.data() + r * I;
    for (std::size_t i = 0; i < I; ++i) {
      const T xv = xr[i];
      const T *wi = w.data() + i * O;
      for (std::size_t o = 0; o < O; ++o) yr[o] += xv * wi[o];
    }
  }
}

template <typename T>
Tensor<T> dense(const Tensor<T> &x, const Tensor<T> &w, const Tensor<T> &b) {
  Tensor<T> y;
  dense_forward(x, w, b, y);
  return y;
}

/// dx may be null when the input gradient is not needed.
template <typename T>
void dense_backward(const Tensor<T> &x, const Tensor<T> &w, const Tensor<T> &dy, Tensor<T> &dw,
                    Tensor<T> &db, Tensor<T> *dx) {
  const std::size_t B = x.dim(0), I = w.dim(0), O = w.dim(1);
  require_shape(dy, {B, O}, "dense_backward dy");
  for (std::size_t r = 0; r < B; ++r) {
    const T *dyr = dy.data() + r * O;
    const T *xr = x.data() + r * I;
    for (std::size_t o = 0; o < O; ++o) db[o] += dyr[o];
    for (std::size_t i = 0; i < I; ++i) {
      const T xv = xr[i];
      T *dwi = dw.data() + i * O;
      for (std::size_t o = 0; o < O; ++o) dwi[o] += xv * dyr[o];
    }
  }
  if (dx == nullptr) return;
  dx->reset({B, I});
  for (std::size_t r = 0; r < B; ++r) {
    const T *dyr = dy.data() + r * O;
    T *dxr = dx->data() + r * I;
    for (std::size_t i = 0; i < I; ++i) {
      const T *wi = w.data() + i * O;
      T acc = 0;
      for (std::size_t o = 0; o < O; ++o) acc += wi[o] * dyr[o];
      dxr[i] = acc;
    }
  }
}

// ---------------------------------------------------------------------------
// conv1d_time: valid temporal cross-correlation.
// y[b, t, o] = bias[o] + sum_{k, f} x[b, t + k, f] * kernel[k, f, o]

template <typename T>
void conv1d_time_forward(const Tensor<T> &x, const Tensor<T> &kernel, const Tensor<T> &bias,
                         Tensor<T> &y) {
  if (x.rank() != 3 || kernel.rank() != 3 || bias.rank() != 1 || x.dim(2) != kernel.dim(1) ||
      bias.dim(0) != kernel.dim(2))
    detail::fail(ErrorCode::kShapeMismatch, "conv1d_time: x ", shape_str(x.shape()), ", kernel ",
                 shape_str(kernel.shape()), ", bias ", shape_str(bias.shape()));
  const std::size_t B = x.dim(0), T_in = x.dim(1), F = x.dim(2);
  const std::size_t K = kernel.dim(0), O = kernel.dim(2);
  if (K > T_in)
    detail::fail(ErrorCode::kShapeMismatch, "conv1d_time: kernel length ", K, " exceeds ", T_in,
                 " frames");
  const std::size_t T_out = T_in - K + 1;
  y.reset({B, T_out, O});
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t t = 0; t < T_out; ++t) {
      T *yt = y.data() + (b * T_out + t) * O;
      for (std::size_t o = 0; o < O; ++o) yt[o] = bias[o];
      // Frames t..t+K-1 are contiguous, so the (k, f) pair is one flat index.
      const T *xt = x.data() + (b * T_in + t) * F;
      const T *kk = kernel.data();
      for (std::size_t kf = 0; kf < K * F; ++kf) {
        const T xv = xt[kf];
        const T *kr = kk + kf * O;
        for (std::size_t o = 0; o < O; ++o) yt[o] += xv * kr[o];
      }
    }
  }
}

template <typename T>
Tensor<T> conv1d_time(const Tensor<T> &x, const Tensor<T> &kernel, const Tensor<T> &bias) {
  Tensor<T> y;
  conv1d_time_forward(x, kernel, bias, y);
  return y;
}

template <typename T>
void conv1d_time_backward(const Tensor<T> &x, const Tensor<T> &kernel, const Tensor<T> &dy,
                          Tensor<T> &dkernel, Tensor<T> &dbias, Tensor<T> *dx) {
  const std::size_t B = x.dim(0), T_in = x.dim(1), F = x.dim(2);
  const std::size_t K = kernel.dim(0), O = kernel.dim(2), T_out = T_in - K + 1;
  require_shape(dy, {B, T_out, O}, "conv1d_time_backward dy");
  if (dx != nullptr) dx->reset(x.shape());
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t t = 0; t < T_out; ++t) {
      const T *dyt = dy.data() + (b * T_out + t) * O;
      for (std::size_t o = 0; o < O; ++o) dbias[o] += dyt[o];
      const T *xt = x.data() + (b * T_in + t) * F;
      for (std::size_t kf = 0; kf < K * F; ++kf) {
        const T xv = xt[kf];
        T *dk = dkernel.data() + kf * O;
        for (std::size_t o = 0; o < O; ++o) dk[o] += xv * dyt[o];
      }
      if (dx == nullptr) continue;
      T *dxt = dx->data() + (b * T_in + t) * F;
      for (std::size_t kf = 0; kf < K * F; ++kf) {
        const T *kr = kernel.data() + kf * O;
        T acc = 0;
        for (std::size_t o = 0; o < O; ++o) acc += kr[o] * dyt[o];
        dxt[kf] += acc;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Activations

template <typename T>
T relu(T x) {
  return x > T(0) ? x : T(0);
}

/// Numerically stable logistic function.
template <typename T>
T sigmoid(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

template <typename T>
void relu_forward(const Tensor<T> &x, Tensor<T> &y) {
  y.reset(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = relu(x[i]);
}

/// dx = dy where the forward output was positive, 0 elsewhere (including 0).
template <typename T>
void relu_backward(const Tensor<T> &y, const Tensor<T> &dy, Tensor<T> &dx) {
  dx.reset(y.shape());
  for (std::size_t i = 0; i < y.size(); ++i) dx[i] = y[i] > T(0) ? dy[i] : T(0);
}

template <typename T>
void sigmoid_forward(const Tensor<T> &x, Tensor<T> &y) {
  y.reset(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = sigmoid(x[i]);
}

template <typename T>
void sigmoid_backward(const Tensor<T> &y, const Tensor<T> &dy, Tensor<T> &dx) {
  dx.reset(y.shape());
  for (std::size_t i = 0; i < y.size(); ++i) dx[i] = dy[i] * y[i] * (T(1) - y[i]);
}

/// Row-wise softmax over the last axis of a rank-2 tensor.
template <typename T>
void softmax_rows(const T *x, T *y, std::size_t n) {
  T mx = *std::max_element(x, x + n);
  T sum = 0;
  for (std::size_t j = 0; j < n; ++j) {
    y[j] = std::exp(x[j] - mx);
    sum += y[j];
  }
  for (std::size_t j = 0; j < n; ++j) y[j] /= sum;
}

template <typename T>
void softmax_forward(const Tensor<T> &x, Tensor<T> &y) {
  if (x.rank() != 2) detail::fail(ErrorCode::kShapeMismatch, "softmax expects a rank-2 tensor");
  y.reset(x.shape());
  const std::size_t B = x.dim(0), C = x.dim(1);
  for (std::size_t r = 0; r < B; ++r) softmax_rows(x.data() + r * C, y.data() + r * C, C);
}

template <typename T>
void softmax_backward(const Tensor<T> &y, const Tensor<T> &dy, Tensor<T> &dx) {
  dx.reset(y.shape());
  const std::size_t B = y.dim(0), C = y.dim(1);
  for (std::size_t r = 0; r < B; ++r) {
    T dot = 0;
    for (std::size_t j = 0; j < C; ++j) dot += dy(r, j) * y(r, j);
    for (std::size_t j = 0; j < C; ++j) dx(r, j) = y(r, j) * (dy(r, j) - dot);
  }
}

// ---------------------------------------------------------------------------
// Mean over the time axis: [B x T x C] -> [B x C]

template <typename T>
void mean_pool_time_forward(const Tensor<T> &x, Tensor<T> &y) {
  const std::size_t B = x.dim(0), Tn = x.dim(1), C = x.dim(2);
  y.reset({B, C});
  const T scale = T(1) / static_cast<T>(Tn);
  for (std::size_t b = 0; b < B; ++b) {
    T *yb = y.data() + b * C;
    for (std::size_t t = 0; t < Tn; ++t) {
      const T *xt = x.data() + (b * Tn + t) * C;
      for (std::size_t c = 0; c < C; ++c) yb[c] += xt[c];
    }
    for (std::size_t c = 0; c < C; ++c) yb[c] *= scale;
  }
}

template <typename T>
void mean_pool_time_backward(const Shape &x_shape, const Tensor<T> &dy, Tensor<T> &dx) {
  const std::size_t B = x_shape[0], Tn = x_shape[1], C = x_shape[2];
  dx.reset(x_shape);
  const T scale = T(1) / static_cast<T>(Tn);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t t = 0; t < Tn; ++t)
      for (std::size_t c = 0; c < C; ++c) dx[(b * Tn + t) * C + c] = dy[b * C + c] * scale;
}

}  // namespace srkws

#endif  // SRKWS_LAYERS_HPP_
