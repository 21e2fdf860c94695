// tests/test_nn.cpp

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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "srkws/error.hpp"
#include "srkws/gradcheck.hpp"
#include "srkws/layers.hpp"
#include "srkws/tensor.hpp"
#include "test_util.hpp"

using Catch::Matchers::WithinAbs;
using namespace srkws;
using srkws::testing::random_tensor;

namespace {

// Projection onto fixed random weights turns any op into a scalar loss whose
// gradient w.r.t. the op output is exactly those weights.
double project(const Tensor<double> &y, const Tensor<double> &r) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * r[i];
  return s;
}

}  // namespace

TEST_CASE("tensor value count follows the shape", "[nn][tensor]") {
  Tensor<double> t({2, 3, 4});
  CHECK(t.size() == 24);
  CHECK(shape_str(t.shape()) == "[2x3x4]");
  CHECK_THROWS_AS(Tensor<double>({2, 2}, std::vector<double>{1, 2, 3}), Error);
}

TEST_CASE("param store keeps gradients shaped like values", "[nn][tensor]") {
  ParamStore<double> ps;
  ps.add("b", {3});
  ps.add("a", {2, 2});
  CHECK(ps.names() == std::vector<std::string>{"a", "b"});
  for (const auto &[name, p] : ps) CHECK(p.grad.shape() == p.value.shape());
  CHECK(ps.num_values() == 7);
  CHECK_THROWS_AS(ps.add("a", {1}), Error);
  CHECK_THROWS_AS(ps.at("missing"), Error);
}

TEST_CASE("dense forward examples", "[nn][dense]") {
  SECTION("identity weights pass the input through") {
    Tensor<double> x({1, 2}, {1.0, 2.0});
    Tensor<double> w({2, 2}, {1.0, 0.0, 0.0, 1.0});
    Tensor<double> b({2});
    auto y = dense(x, w, b);
    CHECK(y.storage() == std::vector<double>{1.0, 2.0});
  }
  SECTION("column of ones sums plus bias") {
    Tensor<double> x({1, 2}, {1.0, 1.0});
    Tensor<double> w({2, 1}, {1.0, 1.0});
    Tensor<double> b({1}, {1.0});
    CHECK(dense(x, w, b)[0] == 3.0);
  }
  SECTION("shape mismatch is rejected") {
    Tensor<double> x({1, 3});
    Tensor<double> w({2, 2});
    Tensor<double> b({2});
    CHECK_THROWS_AS(dense(x, w, b), Error);
  }
}

TEST_CASE("conv1d_time forward examples", "[nn][conv]") {
  Rng rng(11);
  SECTION("K=1 identity kernel reproduces the input") {
    auto x = random_tensor<double>({2, 5, 3}, rng);
    Tensor<double> k({1, 3, 3});
    for (std::size_t f = 0; f < 3; ++f) k[f * 3 + f] = 1.0;
    auto y = conv1d_time(x, k, Tensor<double>({3}));
    CHECK(y.shape() == x.shape());
    CHECK(y.storage() == x.storage());
  }
  SECTION("averaging kernel keeps a constant input constant") {
    Tensor<double> x({1, 6, 2}, 0.75);
    Tensor<double> k({3, 2, 1}, 1.0 / 6.0);
    auto y = conv1d_time(x, k, Tensor<double>({1}));
    REQUIRE(y.shape() == Shape{1, 4, 1});
    for (double v : y.values()) CHECK_THAT(v, WithinAbs(0.75, 1e-15));
  }
  SECTION("output length is T - K + 1") {
    auto y = conv1d_time(Tensor<double>({2, 7, 3}), Tensor<double>({4, 3, 5}), Tensor<double>({5}));
    CHECK(y.shape() == Shape{2, 4, 5});
  }
  SECTION("kernel longer than the input is rejected") {
    CHECK_THROWS_AS(conv1d_time(Tensor<double>({1, 2, 3}), Tensor<double>({3, 3, 1}), Tensor<double>({1})),
                    Error);
  }
}

TEST_CASE("activation examples", "[nn][activation]") {
  CHECK(relu(-1.0) == 0.0);
  CHECK(relu(2.0) == 2.0);
  CHECK(sigmoid(0.0) == 0.5);
  // d sigmoid / dx = s (1 - s); analytic value at 0 is 1/4.
  Tensor<double> y({1}, {sigmoid(0.0)}), dy({1}, {1.0}), dx;
  sigmoid_backward(y, dy, dx);
  CHECK(dx[0] == 0.25);
  CHECK(std::isfinite(sigmoid(-800.0)));
  CHECK(sigmoid(-800.0) >= 0.0);

  Tensor<double> z({1, 2}), p;
  softmax_forward(z, p);
  CHECK(p.storage() == std::vector<double>{0.5, 0.5});
}

TEST_CASE("softmax rows are distributions", "[nn][activation][property]") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t B = 1 + uniform_int(rng, 0, 4), C = 1 + uniform_int(rng, 0, 6);
    auto x = random_tensor<double>({B, C}, rng, -50.0, 50.0);
    Tensor<double> p;
    softmax_forward(x, p);
    for (std::size_t i = 0; i < B; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < C; ++j) {
        CHECK(p(i, j) >= 0.0);
        s += p(i, j);
      }
      CHECK_THAT(s, WithinAbs(1.0, 1e-12));
    }
  }
}

TEST_CASE("finite_diff_check on a quadratic toy loss", "[nn][gradcheck]") {
  // L = sum_i a_i (x_i - c_i)^2 has gradient 2 a_i (x_i - c_i); central
  // differences are exact for quadratics up to rounding.
  ParamStore<double> ps;
  Rng rng(5);
  ps.add("x", {6}).value = random_tensor<double>({6}, rng);
  const auto a = random_tensor<double>({6}, rng, 0.5, 2.0);
  const auto c = random_tensor<double>({6}, rng);
  auto loss = [&](ParamStore<double> &p) {
    double l = 0.0;
    auto &x = p.value("x");
    auto &g = p.grad("x");
    for (std::size_t i = 0; i < 6; ++i) {
      l += a[i] * (x[i] - c[i]) * (x[i] - c[i]);
      g[i] += 2.0 * a[i] * (x[i] - c[i]);
    }
    return l;
  };
  auto report = finite_diff_check(loss, ps, 1e-8);
  CHECK(report.ok);
  CHECK(report.max_rel_error < 1e-8);
}

TEST_CASE("finite_diff_check flags a wrong gradient and a non-finite loss", "[nn][gradcheck]") {
  ParamStore<double> ps;
  ps.add("x", {1}).value[0] = 1.5;
  auto wrong = [](ParamStore<double> &p) {
    const double x = p.value("x")[0];
    p.grad("x")[0] += 3.0 * x;  // true derivative of x^2 is 2x
    return x * x;
  };
  CHECK_FALSE(finite_diff_check(wrong, ps, 1e-4).ok);
  auto nan_loss = [](ParamStore<double> &) { return std::numeric_limits<double>::quiet_NaN(); };
  CHECK_THROWS_AS(finite_diff_check(nan_loss, ps, 1e-4), Error);
}

TEST_CASE("every backward op matches central differences", "[nn][gradcheck][property]") {
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    CAPTURE(seed);
    Rng rng(seed);
    const std::size_t B = 1 + uniform_int(rng, 0, 2);

    SECTION("dense") {
      const std::size_t I = 1 + uniform_int(rng, 0, 4), O = 1 + uniform_int(rng, 0, 4);
      ParamStore<double> ps;
      ps.add("x", {B, I}).value = random_tensor<double>({B, I}, rng);
      ps.add("w", {I, O}).value = random_tensor<double>({I, O}, rng);
      ps.add("b", {O}).value = random_tensor<double>({O}, rng);
      const auto r = random_tensor<double>({B, O}, rng);
      auto loss = [&](ParamStore<double> &p) {
        auto y = dense(p.value("x"), p.value("w"), p.value("b"));
        Tensor<double> dx;
        dense_backward(p.value("x"), p.value("w"), r, p.grad("w"), p.grad("b"), &dx);
        for (std::size_t i = 0; i < dx.size(); ++i) p.grad("x")[i] += dx[i];
        return project(y, r);
      };
      CHECK(finite_diff_check(loss, ps, 1e-6).max_rel_error < 1e-6);
    }

    SECTION("conv1d_time") {
      const std::size_t T = 2 + uniform_int(rng, 0, 5), F = 1 + uniform_int(rng, 0, 3);
      const std::size_t K = 1 + uniform_int(rng, 0, T - 1), O = 1 + uniform_int(rng, 0, 3);
      ParamStore<double> ps;
      ps.add("x", {B, T, F}).value = random_tensor<double>({B, T, F}, rng);
      ps.add("k", {K, F, O}).value = random_tensor<double>({K, F, O}, rng);
      ps.add("b", {O}).value = random_tensor<double>({O}, rng);
      const auto r = random_tensor<double>({B, T - K + 1, O}, rng);
      auto loss = [&](ParamStore<double> &p) {
        auto y = conv1d_time(p.value("x"), p.value("k"), p.value("b"));
        Tensor<double> dx;
        conv1d_time_backward(p.value("x"), p.value("k"), r, p.grad("k"), p.grad("b"), &dx);
        for (std::size_t i = 0; i < dx.size(); ++i) p.grad("x")[i] += dx[i];
        return project(y, r);
      };
      CHECK(finite_diff_check(loss, ps, 1e-6).max_rel_error < 1e-6);
    }

    SECTION("relu, sigmoid, softmax and mean pooling") {
      const std::size_t T = 1 + uniform_int(rng, 0, 4), C = 1 + uniform_int(rng, 0, 4);
      ParamStore<double> ps;
      auto &x = ps.add("x", {B, T, C}).value;
      x = random_tensor<double>({B, T, C}, rng, -2.0, 2.0);
      // Keep relu inputs away from the kink so differences are meaningful.
      for (auto &v : x.values())
        if (std::fabs(v) < 0.05) v = v < 0 ? -0.05 : 0.05;
      const auto r3 = random_tensor<double>({B, T, C}, rng);
      const auto r2 = random_tensor<double>({B * T, C}, rng);
      const auto rp = random_tensor<double>({B, C}, rng);
      auto loss = [&](ParamStore<double> &p) {
        const auto &in = p.value("x");
        Tensor<double> y_relu, y_sig, y_soft, y_pool, d;
        relu_forward(in, y_relu);
        sigmoid_forward(in, y_sig);
        Tensor<double> flat({B * T, C}, in.storage());
        softmax_forward(flat, y_soft);
        mean_pool_time_forward(in, y_pool);
        double l = project(y_relu, r3) + project(y_sig, r3) + project(y_soft, r2) + project(y_pool, rp);
        auto &g = p.grad("x");
        relu_backward(y_relu, r3, d);
        for (std::size_t i = 0; i < d.size(); ++i) g[i] += d[i];
        sigmoid_backward(y_sig, r3, d);
        for (std::size_t i = 0; i < d.size(); ++i) g[i] += d[i];
        softmax_backward(y_soft, r2, d);
        for (std::size_t i = 0; i < d.size(); ++i) g[i] += d[i];
        mean_pool_time_backward(in.shape(), rp, d);
        for (std::size_t i = 0; i < d.size(); ++i) g[i] += d[i];
        return l;
      };
      CHECK(finite_diff_check(loss, ps, 1e-6).max_rel_error < 1e-6);
    }
  }
}

TEST_CASE("forward passes are deterministic", "[nn]") {
  Rng rng(9);
  auto x = random_tensor<double>({3, 6, 4}, rng);
  auto k = random_tensor<double>({2, 4, 5}, rng);
  auto b = random_tensor<double>({5}, rng);
  CHECK(conv1d_time(x, k, b) == conv1d_time(x, k, b));
}
