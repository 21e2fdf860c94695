// include/srkws/tensor.hpp

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

#ifndef SRKWS_TENSOR_HPP_
#define SRKWS_TENSOR_HPP_

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "srkws/error.hpp"

namespace srkws {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape &shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string shape_str(const Shape &shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

/// Dense row-major tensor. T is double for gradient checks, float for speed.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T(0))
      : shape_(std::move(shape)), values_(shape_size(shape_), fill) {}
  Tensor(Shape shape, std::vector<T> values) : shape_(std::move(shape)), values_(std::move(values)) {
    if (values_.size() != shape_size(shape_))
      detail::fail(ErrorCode::kShapeMismatch, "tensor ", shape_str(shape_), " given ", values_.size(),
                   " values");
  }

  const Shape &shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  T *data() { return values_.data(); }
  const T *data() const { return values_.data(); }
  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  const std::vector<T> &storage() const { return values_; }

  T &operator[](std::size_t i) { return values_[i]; }
  const T &operator[](std::size_t i) const { return values_[i]; }
  T &operator()(std::size_t i, std::size_t j) { return values_[i * shape_[1] + j]; }
  const T &operator()(std::size_t i, std::size_t j) const { return values_[i * shape_[1] + j]; }

  void fill(T v) { std::fill(values_.begin(), values_.end(), v); }

  /// Resizes to `shape` and zero-fills; reuses storage when possible.
  void reset(const Shape &shape) {
    shape_ = shape;
    values_.assign(shape_size(shape_), T(0));
  }

  template <typename U>
  Tensor<U> cast() const {
    return Tensor<U>(shape_, std::vector<U>(values_.begin(), values_.end()));
  }

  bool operator==(const Tensor &) const = default;

 private:
  Shape shape_;
  std::vector<T> values_;
};

template <typename T>
void require_shape(const Tensor<T> &t, const Shape &expected, const char *what) {
  if (t.shape() != expected)
    detail::fail(ErrorCode::kShapeMismatch, what, ": expected ", shape_str(expected), ", got ",
                 shape_str(t.shape()));
}

template <typename T>
struct Param {
  Tensor<T> value;
  Tensor<T> grad;
};

/// Named parameters with matching gradient accumulators. Iteration order is
/// by name, so anything that walks the store is deterministic.
template <typename T>
class ParamStore {
 public:
  Param<T> &add(const std::string &name, const Shape &shape) {
    auto [it, inserted] = params_.try_emplace(name, Param<T>{Tensor<T>(shape), Tensor<T>(shape)});
    if (!inserted) detail::fail(ErrorCode::kInvalidArgument, "duplicate parameter '", name, "'");
    return it->second;
  }

  bool contains(const std::string &name) const { return params_.count(name) != 0; }

  Param<T> &at(const std::string &name) {
    auto it = params_.find(name);
    if (it == params_.end()) detail::fail(ErrorCode::kInvalidArgument, "no parameter '", name, "'");
    return it->second;
  }
  const Param<T> &at(const std::string &name) const {
    auto it = params_.find(name);
    if (it == params_.end()) detail::fail(ErrorCode::kInvalidArgument, "no parameter '", name, "'");
    return it->second;
  }

  Tensor<T> &value(const std::string &name) { return at(name).value; }
  const Tensor<T> &value(const std::string &name) const { return at(name).value; }
  Tensor<T> &grad(const std::string &name) { return at(name).grad; }
  const Tensor<T> &grad(const std::string &name) const { return at(name).grad; }

  void zero_grad() {
    for (auto &[name, p] : params_) p.grad.fill(T(0));
  }

  std::size_t num_values() const {
    std::size_t n = 0;
    for (const auto &[name, p] : params_) n += p.value.size();
    return n;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto &[name, p] : params_) out.push_back(name);
    return out;
  }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }
  std::size_t size() const { return params_.size(); }

  template <typename U>
  ParamStore<U> cast() const {
    ParamStore<U> out;
    for (const auto &[name, p] : params_) out.add(name, p.value.shape()).value = p.value.template cast<U>();
    return out;
  }

 private:
  std::map<std::string, Param<T>> params_;
};

}  // namespace srkws

#endif  // SRKWS_TENSOR_HPP_
