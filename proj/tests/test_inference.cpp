// tests/test_inference.cpp

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
#include <numeric>
#include <sstream>

#include "srkws/inference.hpp"
#include "srkws/stream.hpp"
#include "test_util.hpp"

using Catch::Matchers::WithinAbs;
using namespace srkws;

namespace {

BranchProbs random_branch_probs(Rng &rng, std::size_t N) {
  BranchProbs bp;
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    // Exponential draws give a uniform point on the simplex.
    bp.p_c.push_back(-std::log(uniform(rng, 1e-12, 1.0)));
    s += bp.p_c.back();
  }
  for (auto &p : bp.p_c) p /= s;
  bp.p_k1 = uniform(rng, 0.0, 1.0);
  bp.p_s1 = uniform(rng, 0.0, 1.0);
  return bp;
}

Classification fixed(LabelKind kind) {
  Classification c;
  c.dist.p = {0.0, 0.0, 0.0, 0.0, 0.0};
  const std::size_t idx = kind == LabelKind::kKeyword ? 0 : kind == LabelKind::kNonKeywordSpeech ? 3 : 4;
  c.dist.p[idx] = 1.0;
  c.decision = decide(c.dist);
  return c;
}

}  // namespace

TEST_CASE("branch probabilities from logits", "[inference]") {
  std::vector<double> zeros = {0.0, 0.0};
  auto bp = branch_probs(zeros, 0.0, 0.0);
  CHECK(bp.p_c == std::vector<double>{0.5, 0.5});
  CHECK(bp.p_k1 == 0.5);
  CHECK(bp.p_s1 == 0.5);
  CHECK_THAT(branch_probs(zeros, std::log(4.0), 0.0).p_k1, WithinAbs(0.8, 1e-15));
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> l(4);
    for (auto &v : l) v = uniform(rng, -30.0, 30.0);
    auto b = branch_probs(l, 0.0, 0.0);
    CHECK_THAT(std::accumulate(b.p_c.begin(), b.p_c.end(), 0.0), WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("combine examples", "[inference]") {
  CHECK(combine({{0.5, 0.5}, 1.0, 1.0}).p == std::vector<double>{0.5, 0.5, 0.0, 0.0});
  CHECK(combine({{0.5, 0.5}, 0.3, 0.0}).p == std::vector<double>{0.0, 0.0, 0.0, 1.0});
  auto d = combine({{0.7, 0.3}, 0.8, 0.9});
  const std::vector<double> expect = {0.504, 0.216, 0.18, 0.1};
  for (std::size_t i = 0; i < 4; ++i) CHECK_THAT(d.p[i], WithinAbs(expect[i], 1e-15));
}

TEST_CASE("combined distribution properties", "[inference][property]") {
  Rng rng(2);
  for (int trial = 0; trial < 20000; ++trial) {
    const std::size_t N = 1 + uniform_int(rng, 0, 9);
    auto bp = random_branch_probs(rng, N);
    REQUIRE(is_valid(bp));
    auto d = combine(bp);
    REQUIRE(d.p.size() == N + 2);
    const double sum = std::accumulate(d.p.begin(), d.p.end(), 0.0);
    REQUIRE(std::fabs(sum - 1.0) <= 1e-9);
    for (double p : d.p) REQUIRE(p >= 0.0);
    // every keyword entry is bounded by p_K1 p_S1
    for (std::size_t i = 0; i < N; ++i) REQUIRE(d.p[i] <= bp.p_k1 * bp.p_s1);
    // more speech never raises the non-speech entry
    auto more = bp;
    more.p_s1 = uniform(rng, bp.p_s1, 1.0);
    REQUIRE(combine(more).p[N + 1] <= d.p[N + 1]);
  }
}

TEST_CASE("decisions", "[inference]") {
  auto d = decide(combine({{0.7, 0.3}, 0.8, 0.9}));
  CHECK(d.label == 1);
  CHECK(d.kind == LabelKind::kKeyword);
  CHECK(d.keyword == std::optional<std::size_t>{0});
  CHECK(decide({{0.2, 0.2, 0.5, 0.1}}).kind == LabelKind::kNonKeywordSpeech);
  auto tie = decide({{0.25, 0.25, 0.25, 0.25}});
  CHECK(tie.kind == LabelKind::kNonSpeech);
  CHECK(tie.label == 4);

  std::vector<double> dominant = {0.0, 0.0, 0.0, 9.0};
  CHECK(decide_baseline(dominant).kind == LabelKind::kNonSpeech);
  std::vector<double> uniform_logits(4, 0.3);
  CHECK(decide_baseline(uniform_logits).kind == LabelKind::kNonSpeech);
  std::vector<double> first = {2.0, 1.0, 0.0, 0.0};
  auto b = decide_baseline(first);
  CHECK(b.label == 1);
  CHECK(b.keyword == std::optional<std::size_t>{0});
}

TEST_CASE("decision is invariant to a shift of the classifier logits", "[inference][property]") {
  Rng rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> cls(3);
    for (auto &v : cls) v = uniform(rng, -5.0, 5.0);
    const double kw = uniform(rng, -5.0, 5.0), sp = uniform(rng, -5.0, 5.0);
    auto shifted = cls;
    const double c = uniform(rng, -20.0, 20.0);
    for (auto &v : shifted) v += c;
    CHECK(decide(combine(branch_probs(cls, kw, sp))) == decide(combine(branch_probs(shifted, kw, sp))));
  }
}

TEST_CASE("stream windows", "[inference][stream]") {
  auto stub = [](std::span<const float>) { return fixed(LabelKind::kNonSpeech); };
  StreamConfig sc;
  SECTION("2 s signal gives 11 windows starting every 0.1 s") {
    auto w = stream_detect(std::vector<float>(32000, 0.0f), 16000, sc, stub);
    REQUIRE(w.size() == 11);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK_THAT(w[i].start, WithinAbs(0.1 * i, 1e-12));
  }
  SECTION("exactly one window for 1 s") {
    CHECK(stream_detect(std::vector<float>(16000, 0.0f), 16000, sc, stub).size() == 1);
  }
  SECTION("short input is rejected") {
    CHECK_THROWS_AS(stream_detect(std::vector<float>(15999, 0.0f), 16000, sc, stub), Error);
  }
  SECTION("window count for an hour") {
    // starts 0, 0.1, ..., 3599.0 -> 35991
    CHECK(num_windows(3600 * 16000, 16000, 1600) == 35991);
  }
  SECTION("identical window content gives identical output") {
    // A signal with period 0.1 s: every window holds the same samples.
    auto model_like = [](std::span<const float> w) {
      double e = 0.0;
      for (float v : w) e += v * v;
      return fixed(e > 100.0 ? LabelKind::kKeyword : LabelKind::kNonSpeech);
    };
    std::vector<float> x(48000);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<float>(std::sin(2 * 3.14159265358979 * 10.0 * i / 16000.0));
    auto w = stream_detect(x, 16000, sc, model_like);
    for (const auto &win : w) CHECK(win.decision == w.front().decision);
  }
  SECTION("report layout") {
    auto w = stream_detect(std::vector<float>(17600, 0.0f), 16000, sc, stub);
    std::ostringstream os;
    write_stream_report(os, w);
    CHECK(os.str() ==
          "start_time_s,decision_kind,keyword_index,p0,p1,p2,p3,p4\n"
          "0.000000,non_speech,-1,0,0,0,0,1\n"
          "0.100000,non_speech,-1,0,0,0,0,1\n");
  }
}

TEST_CASE("false alarms per hour", "[inference][stream]") {
  CHECK(fa_per_hour(0.05, 0.1) == 1800.0);
  CHECK(fa_per_hour(0.0, 0.1) == 0.0);
  CHECK_THAT(fa_per_hour(0.01, 0.5), WithinAbs(72.0, 1e-12));
  CHECK_THROWS_AS(fa_per_hour(0.1, 0.0), Error);

  SECTION("one-hour negative stream with a detector forced to 5% window FA") {
    // Every 20th window is decided as a keyword: 1800 of 35991.
    std::size_t calls = 0;
    auto forced = [&calls](std::span<const float>) {
      return fixed(calls++ % 20 == 0 ? LabelKind::kKeyword : LabelKind::kNonSpeech);
    };
    std::vector<float> silence(static_cast<std::size_t>(3600) * 16000, 0.0f);
    auto w = stream_detect(silence, 16000, StreamConfig{}, forced);
    REQUIRE(w.size() == 35991);
    const double per_hour = fa_per_hour(window_fa_rate(w), 0.1);
    CHECK(std::fabs(per_hour - 1800.0) <= 60.0);
  }
}
