// include/srkws/optim.hpp

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

#ifndef SRKWS_OPTIM_HPP_
#define SRKWS_OPTIM_HPP_

#include <cmath>
#include <map>
#include <string>

#include "srkws/error.hpp"
#include "srkws/tensor.hpp"

namespace srkws {

/// SGD with heavy-ball momentum: v <- mu v + g; p <- p - lr v.
template <typename T>
class Sgd {
 public:
  /// Applies one update and zeroes every gradient. Throws before touching
  /// any parameter if a gradient is non-finite.
  void step(ParamStore<T> &params, double lr, double momentum) {
    for (auto &[name, p] : params)
      for (std::size_t i = 0; i < p.grad.size(); ++i)
        if (!std::isfinite(static_cast<double>(p.grad[i])))
          detail::fail(ErrorCode::kNonFinite, "gradient of '", name, "'[", i, "] is ",
                       static_cast<double>(p.grad[i]));
    const T mu = static_cast<T>(momentum), eta = static_cast<T>(lr);
    for (auto &[name, p] : params) {
      auto [it, fresh] = velocity_.try_emplace(name, Tensor<T>(p.value.shape()));
      Tensor<T> &v = it->second;
      for (std::size_t i = 0; i < p.value.size(); ++i) {
        v[i] = mu * v[i] + p.grad[i];
        p.value[i] -= eta * v[i];
      }
      p.grad.fill(T(0));
    }
  }

  const Tensor<T> &velocity(const std::string &name) const { return velocity_.at(name); }

 private:
  std::map<std::string, Tensor<T>> velocity_;
};

template <typename T>
void sgd_step(ParamStore<T> &params, Sgd<T> &opt, double lr, double momentum) {
  opt.step(params, lr, momentum);
}

}  // namespace srkws

#endif  // SRKWS_OPTIM_HPP_
