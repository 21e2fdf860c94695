// include/srkws/wav.hpp

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

#ifndef SRKWS_WAV_HPP_
#define SRKWS_WAV_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "srkws/error.hpp"

namespace srkws {

struct AudioSignal {
  int sample_rate = 16000;
  std::vector<float> samples;  // amplitudes in [-1, 1)

  double duration() const {
    return static_cast<double>(samples.size()) / static_cast<double>(sample_rate);
  }
};

namespace detail {

inline std::uint32_t read_u32_le(const unsigned char *p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16_le(const unsigned char *p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void put_u32_le(std::vector<unsigned char> &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

inline void put_u16_le(std::vector<unsigned char> &out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}

}  // namespace detail

/// Quantizes an amplitude to a 16-bit PCM code (round to nearest, clipped).
inline std::int16_t to_pcm16(float amplitude) {
  double v = std::nearbyint(static_cast<double>(amplitude) * 32768.0);
  v = std::clamp(v, -32768.0, 32767.0);
  return static_cast<std::int16_t>(v);
}

/// Reads a RIFF/WAVE file holding 16-bit PCM mono audio. Codes are mapped to
/// amplitudes by division by 32768. Unknown chunks are skipped.
inline AudioSignal read_wav(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) detail::fail(ErrorCode::kFileNotFound, path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    detail::fail(ErrorCode::kParse, path.string(), ": not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char *data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char *chunk = bytes.data() + pos;
    std::uint32_t size = detail::read_u32_le(chunk + 4);
    std::size_t body = pos + 8;
    std::size_t avail = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || avail < 16) detail::fail(ErrorCode::kParse, path.string(), ": short fmt chunk");
      format = detail::read_u16_le(chunk + 8);
      channels = detail::read_u16_le(chunk + 10);
      rate = detail::read_u32_le(chunk + 12);
      bits = detail::read_u16_le(chunk + 22);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = std::min<std::size_t>(size, avail);
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) detail::fail(ErrorCode::kParse, path.string(), ": missing fmt chunk");
  if (format != 1 || bits != 16)
    detail::fail(ErrorCode::kNotPcm, path.string(), ": format tag ", format, ", ", bits,
                 " bits (need 16-bit PCM)");
  if (channels != 1)
    detail::fail(ErrorCode::kMultiChannel, path.string(), ": ", channels, " channels (need mono)");
  if (data == nullptr) detail::fail(ErrorCode::kParse, path.string(), ": missing data chunk");

  AudioSignal signal;
  signal.sample_rate = static_cast<int>(rate);
  signal.samples.resize(data_size / 2);
  for (std::size_t i = 0; i < signal.samples.size(); ++i) {
    auto code = static_cast<std::int16_t>(detail::read_u16_le(data + 2 * i));
    signal.samples[i] = static_cast<float>(code) / 32768.0f;
  }
  return signal;
}

inline void write_wav(const std::filesystem::path &path, const AudioSignal &signal) {
  std::vector<unsigned char> out;
  auto n = static_cast<std::uint32_t>(signal.samples.size());
  out.reserve(44 + 2 * n);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  detail::put_u32_le(out, 36 + 2 * n);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  detail::put_u32_le(out, 16);
  detail::put_u16_le(out, 1);  // PCM
  detail::put_u16_le(out, 1);  // mono
  detail::put_u32_le(out, static_cast<std::uint32_t>(signal.sample_rate));
  detail::put_u32_le(out, static_cast<std::uint32_t>(signal.sample_rate) * 2);
  detail::put_u16_le(out, 2);
  detail::put_u16_le(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  detail::put_u32_le(out, 2 * n);
  for (float x : signal.samples)
    detail::put_u16_le(out, static_cast<std::uint16_t>(to_pcm16(x)));

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) detail::fail(ErrorCode::kIo, "cannot write ", path.string());
  os.write(reinterpret_cast<const char *>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!os) detail::fail(ErrorCode::kIo, "short write to ", path.string());
}

}  // namespace srkws

#endif  // SRKWS_WAV_HPP_
