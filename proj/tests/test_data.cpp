// tests/test_data.cpp

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

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>

#include "srkws/data.hpp"
#include "srkws/hier_label.hpp"
#include "srkws/wav.hpp"
#include "test_util.hpp"

using namespace srkws;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("no srkws::Error thrown");
  return ErrorCode::kInvalidArgument;
}

// Minimal RIFF writer with free choice of format tag, channels and width.
void write_raw_wav(const fs::path &path, std::uint16_t format, std::uint16_t channels,
                   std::uint16_t bits, const std::vector<std::int16_t> &samples) {
  auto u32 = [](std::ofstream &o, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) o.put(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  auto u16 = [](std::ofstream &o, std::uint16_t v) {
    o.put(static_cast<char>(v & 0xff));
    o.put(static_cast<char>(v >> 8));
  };
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  std::ofstream o(path, std::ios::binary);
  o.write("RIFF", 4);
  u32(o, 36 + data_bytes);
  o.write("WAVEfmt ", 8);
  u32(o, 16);
  u16(o, format);
  u16(o, channels);
  u32(o, 16000);
  u32(o, 16000u * channels * bits / 8);
  u16(o, static_cast<std::uint16_t>(channels * bits / 8));
  u16(o, bits);
  o.write("data", 4);
  u32(o, data_bytes);
  for (auto s : samples) u16(o, static_cast<std::uint16_t>(s));
}

// Independent energy-profile oracle: 25 ms frames with 10 ms hop; returns
// the centre sample of the most energetic frame.
std::size_t energy_peak(const std::vector<float> &x, int sr) {
  const std::size_t win = static_cast<std::size_t>(sr / 40), hop = static_cast<std::size_t>(sr / 100);
  double best = -1.0;
  std::size_t arg = 0;
  for (std::size_t s = 0; s + win <= x.size(); s += hop) {
    double e = 0.0;
    for (std::size_t i = s; i < s + win; ++i) e += static_cast<double>(x[i]) * x[i];
    if (e > best) {
      best = e;
      arg = s + win / 2;
    }
  }
  return arg;
}

}  // namespace

TEST_CASE("hierarchical label invariants", "[data][label]") {
  CHECK(is_valid(HierLabel::keyword(2), 3));
  CHECK_FALSE(is_valid(HierLabel::keyword(3), 3));
  CHECK(is_valid(HierLabel::non_keyword_speech(), 3));
  CHECK(is_valid(HierLabel::non_speech(), 3));
  CHECK_FALSE(is_valid(HierLabel{false, true, std::nullopt}, 3));  // k without speech
  CHECK_FALSE(is_valid(HierLabel{true, std::nullopt, std::nullopt}, 3));  // speech without k
  CHECK_FALSE(is_valid(HierLabel{true, false, 1}, 3));  // c without keyword
  for (std::size_t i = 0; i < 5; ++i) CHECK(class_index(label_from_class_index(i, 3), 3) == i);
}

TEST_CASE("wav reading", "[data][wav]") {
  auto dir = srkws::testing::scratch_dir("wav");

  SECTION("all-zero file reads as silence") {
    write_raw_wav(dir / "z.wav", 1, 1, 16, std::vector<std::int16_t>(100, 0));
    auto a = read_wav(dir / "z.wav");
    CHECK(a.sample_rate == 16000);
    CHECK(a.samples == std::vector<float>(100, 0.0f));
  }
  SECTION("16384 maps to 0.5 and -32768 to -1") {
    write_raw_wav(dir / "h.wav", 1, 1, 16, {16384, -32768, 32767});
    auto a = read_wav(dir / "h.wav");
    CHECK(a.samples[0] == 0.5f);
    CHECK(a.samples[1] == -1.0f);
    CHECK(a.samples[2] == static_cast<float>(32767.0 / 32768.0));
  }
  SECTION("seeded round trip keeps every 16-bit value") {
    Rng rng(44);
    std::vector<std::int16_t> codes(4000);
    for (auto &c : codes) c = static_cast<std::int16_t>(uniform_int(rng, 0, 65535) - 32768);
    AudioSignal sig;
    for (auto c : codes) sig.samples.push_back(static_cast<float>(c / 32768.0));
    write_wav(dir / "r.wav", sig);
    auto back = read_wav(dir / "r.wav");
    REQUIRE(back.samples.size() == codes.size());
    for (std::size_t i = 0; i < codes.size(); ++i)
      CHECK(std::lround(back.samples[i] * 32768.0) == codes[i]);
  }
  SECTION("each failure has its own error kind") {
    CHECK(code_of([&] { read_wav(dir / "missing.wav"); }) == ErrorCode::kFileNotFound);
    write_raw_wav(dir / "float.wav", 3, 1, 32, {0, 0});
    CHECK(code_of([&] { read_wav(dir / "float.wav"); }) == ErrorCode::kNotPcm);
    write_raw_wav(dir / "stereo.wav", 1, 2, 16, {0, 0, 0, 0});
    CHECK(code_of([&] { read_wav(dir / "stereo.wav"); }) == ErrorCode::kMultiChannel);
    std::ofstream(dir / "junk.wav") << "not a wav file";
    CHECK(code_of([&] { read_wav(dir / "junk.wav"); }) == ErrorCode::kParse);
  }
}

TEST_CASE("manifest parsing", "[data][manifest]") {
  auto dir = srkws::testing::scratch_dir("manifest");
  SECTION("empty file gives no entries") {
    std::ofstream(dir / "m.jsonl") << "";
    CHECK(load_manifest(dir / "m.jsonl").empty());
  }
  SECTION("keyword line") {
    auto e = parse_manifest_record(R"({"path":"a.wav","label_kind":"keyword","keyword_index":2})", 1);
    CHECK(e.path == "a.wav");
    CHECK(e.label == HierLabel{true, true, 2});
  }
  SECTION("order and blank lines") {
    std::ofstream(dir / "m.jsonl") << R"({"path":"a.wav","label_kind":"non_speech"})" << "\n\n"
                                   << R"({"path":"b.wav","label_kind":"non_keyword_speech"})" << "\n";
    auto es = load_manifest(dir / "m.jsonl");
    REQUIRE(es.size() == 2);
    CHECK(es[0].label == HierLabel::non_speech());
    CHECK(es[1].label == HierLabel::non_keyword_speech());
  }
  SECTION("non_speech with a keyword index is rejected") {
    CHECK(code_of([] {
            parse_manifest_record(R"({"path":"a.wav","label_kind":"non_speech","keyword_index":0})", 1);
          }) == ErrorCode::kInvalidLabel);
  }
  SECTION("malformed line reports its line number") {
    std::ofstream(dir / "m.jsonl") << R"({"path":"a.wav","label_kind":"non_speech"})" << "\n{oops\n";
    try {
      load_manifest(dir / "m.jsonl");
      FAIL("expected a parse error");
    } catch (const Error &e) {
      CHECK(e.code() == ErrorCode::kParse);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  SECTION("keyword index beyond N") {
    CHECK_THROWS_AS(parse_manifest_record(R"({"path":"a.wav","label_kind":"keyword","keyword_index":3})",
                                          1, std::size_t{3}),
                    Error);
  }
  SECTION("random manifests round-trip with valid labels") {
    Rng rng(8);
    std::vector<ManifestEntry> es;
    for (int i = 0; i < 300; ++i)
      es.push_back({"clip" + std::to_string(i) + ".wav", label_from_class_index(uniform_int(rng, 0, 5), 4)});
    save_manifest(dir / "r.jsonl", es);
    auto back = load_manifest(dir / "r.jsonl", std::size_t{4});
    REQUIRE(back.size() == es.size());
    for (std::size_t i = 0; i < es.size(); ++i) {
      CHECK(back[i].path == es[i].path);
      CHECK(back[i].label == es[i].label);
      CHECK(is_valid(back[i].label, 4));
    }
  }
}

TEST_CASE("stratified split", "[data][split]") {
  auto same_class = [](std::size_t n) {
    std::vector<ManifestEntry> es;
    for (std::size_t i = 0; i < n; ++i) es.push_back({"c" + std::to_string(i), HierLabel::keyword(0)});
    return es;
  };
  SECTION("100 entries give 80/10/10") {
    auto s = split_dataset(same_class(100), 1);
    CHECK(s.train.size() == 80);
    CHECK(s.validation.size() == 10);
    CHECK(s.test.size() == 10);
  }
  SECTION("10 entries give 8/1/1") {
    auto s = split_dataset(same_class(10), 1);
    CHECK(s.train.size() == 8);
    CHECK(s.validation.size() == 1);
    CHECK(s.test.size() == 1);
  }
  SECTION("floor rule for larger classes") {
    for (std::size_t n = 10; n < 200; ++n) {
      auto sz = split_sizes(n);
      CHECK(sz.train == n * 8 / 10);
      CHECK(sz.validation == n / 10);
    }
  }
  SECTION("fewer than 3 samples in a class is an error") {
    CHECK(code_of([&] { split_dataset(same_class(2), 1); }) == ErrorCode::kInsufficientData);
  }
  SECTION("partition, determinism and stratification") {
    Rng rng(17);
    std::vector<ManifestEntry> es;
    for (int i = 0; i < 700; ++i)
      es.push_back({"c" + std::to_string(i), label_from_class_index(uniform_int(rng, 0, 4), 3)});
    auto a = split_dataset(es, 5);
    auto b = split_dataset(es, 5);
    auto c = split_dataset(es, 6);
    auto paths = [](const std::vector<ManifestEntry> &v) {
      std::vector<std::string> p;
      for (const auto &e : v) p.push_back(e.path);
      return p;
    };
    CHECK(paths(a.train) == paths(b.train));
    CHECK(paths(a.test) == paths(b.test));
    CHECK(paths(a.train) != paths(c.train));
    std::set<std::string> seen;
    for (const auto *part : {&a.train, &a.validation, &a.test})
      for (const auto &e : *part) CHECK(seen.insert(e.path).second);
    CHECK(seen.size() == es.size());
    std::map<std::size_t, std::size_t> total, in_train;
    for (const auto &e : es) ++total[class_index(e.label, 3)];
    for (const auto &e : a.train) ++in_train[class_index(e.label, 3)];
    for (auto [k, n] : total) CHECK(in_train[k] == split_sizes(n).train);
  }
}

TEST_CASE("synthetic corpus", "[data][synth]") {
  SynthConfig cfg;
  cfg.samples_per_class = 10;
  SECTION("class counts") {
    auto clips = synth_generate(cfg);
    REQUIRE(clips.size() == 50);
    std::map<std::size_t, std::size_t> counts;
    for (const auto &c : clips) {
      CHECK(is_valid(c.label, 3));
      CHECK(c.audio.samples.size() == 16000);
      ++counts[class_index(c.label, 3)];
    }
    for (std::size_t k = 0; k < 5; ++k) CHECK(counts[k] == 10);
  }
  SECTION("deterministic given the seed") {
    auto a = synth_generate(cfg);
    auto b = synth_generate(cfg);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].audio.samples == b[i].audio.samples);
    cfg.seed = 2;
    auto c = synth_generate(cfg);
    CHECK(c[0].audio.samples != a[0].audio.samples);
    CHECK(c.size() == a.size());
  }
  SECTION("every keyword clip peaks in the middle third") {
    cfg.samples_per_class = 200;
    for (const auto &clip : synth_generate(cfg)) {
      if (!clip.label.is_keyword()) continue;
      const std::size_t n = clip.audio.samples.size();
      const std::size_t peak = energy_peak(clip.audio.samples, clip.audio.sample_rate);
      CHECK(peak >= n / 3);
      CHECK(peak < 2 * n / 3);
    }
  }
  SECTION("samples stay in range") {
    for (const auto &clip : synth_generate(cfg))
      for (float v : clip.audio.samples) REQUIRE((v >= -1.0f && v < 1.0f));
  }
  SECTION("out-of-domain corpus holds only negatives") {
    cfg.out_of_domain = true;
    auto clips = synth_generate(cfg);
    CHECK(clips.size() == 20);
    for (const auto &c : clips) CHECK(c.label.is_negative());
  }
  SECTION("invalid configs") {
    cfg.n_keywords = 0;
    CHECK_THROWS_AS(synth_generate(cfg), Error);
  }
}
