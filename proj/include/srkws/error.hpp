// include/srkws/error.hpp

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

#ifndef SRKWS_ERROR_HPP_
#define SRKWS_ERROR_HPP_

#include <sstream>
#include <stdexcept>
#include <string>

namespace srkws {

enum class ErrorCode {
  kInvalidArgument,
  kShapeMismatch,
  kFileNotFound,
  kIo,
  kNotPcm,
  kMultiChannel,
  kParse,
  kInvalidLabel,
  kVersionMismatch,
  kConfigMismatch,
  kNonFinite,
  kDivergence,
  kInsufficientData,
};

inline const char *error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kShapeMismatch: return "shape mismatch";
    case ErrorCode::kFileNotFound: return "file not found";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kNotPcm: return "unsupported encoding";
    case ErrorCode::kMultiChannel: return "multi-channel audio";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kInvalidLabel: return "invalid label";
    case ErrorCode::kVersionMismatch: return "version mismatch";
    case ErrorCode::kConfigMismatch: return "config mismatch";
    case ErrorCode::kNonFinite: return "non-finite value";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kInsufficientData: return "insufficient data";
  }
  return "error";
}

/// Every failure in the library is reported as an Error carrying a code, so
/// callers (and tests) can tell e.g. a missing WAV from a stereo one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

namespace detail {

template <typename... Args>
[[noreturn]] void fail(ErrorCode code, const Args &...args) {
  std::ostringstream os;
  (os << ... << args);
  throw Error(code, os.str());
}

}  // namespace detail

}  // namespace srkws

#endif  // SRKWS_ERROR_HPP_
