// include/srkws/hier_label.hpp

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

#ifndef SRKWS_HIER_LABEL_HPP_
#define SRKWS_HIER_LABEL_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "srkws/error.hpp"

namespace srkws {

enum class LabelKind { kKeyword, kNonKeywordSpeech, kNonSpeech };

inline std::string_view label_kind_name(LabelKind kind) {
  switch (kind) {
    case LabelKind::kKeyword: return "keyword";
    case LabelKind::kNonKeywordSpeech: return "non_keyword_speech";
    case LabelKind::kNonSpeech: return "non_speech";
  }
  return "?";
}

inline LabelKind parse_label_kind(std::string_view name) {
  if (name == "keyword") return LabelKind::kKeyword;
  if (name == "non_keyword_speech") return LabelKind::kNonKeywordSpeech;
  if (name == "non_speech") return LabelKind::kNonSpeech;
  detail::fail(ErrorCode::kInvalidLabel, "unknown label_kind '", name, "'");
}

// Ground truth for one clip, expressed as the three nested random variables:
// speech present (s), keyword-like given speech (k), which keyword (c).
// k is only meaningful when s holds, and c only when k holds.
struct HierLabel {
  bool s = false;
  std::optional<bool> k;
  std::optional<std::size_t> c;

  static HierLabel keyword(std::size_t index) { return {true, true, index}; }
  static HierLabel non_keyword_speech() { return {true, false, std::nullopt}; }
  static HierLabel non_speech() { return {false, std::nullopt, std::nullopt}; }

  bool is_keyword() const { return s && k.value_or(false); }
  bool is_negative() const { return !is_keyword(); }

  LabelKind kind() const {
    if (!s) return LabelKind::kNonSpeech;
    return is_keyword() ? LabelKind::kKeyword : LabelKind::kNonKeywordSpeech;
  }

  bool operator==(const HierLabel &) const = default;
};

inline bool is_valid(const HierLabel &label, std::size_t n_keywords) {
  if (label.k.has_value() != label.s) return false;
  if (label.c.has_value() != (label.k.has_value() && *label.k)) return false;
  if (label.c && *label.c >= n_keywords) return false;
  return true;
}

inline void validate(const HierLabel &label, std::size_t n_keywords) {
  if (!is_valid(label, n_keywords))
    detail::fail(ErrorCode::kInvalidLabel, "label violates hierarchy (s=", label.s,
                 ", k=", label.k ? (*label.k ? "1" : "0") : "-", ", c=",
                 label.c ? std::to_string(*label.c) : "-", ", N=", n_keywords, ")");
}

/// Flat (N+2)-way class index: keywords 0..N-1, non-keyword speech N,
/// non-speech N+1.
inline std::size_t class_index(const HierLabel &label, std::size_t n_keywords) {
  switch (label.kind()) {
    case LabelKind::kKeyword: return *label.c;
    case LabelKind::kNonKeywordSpeech: return n_keywords;
    case LabelKind::kNonSpeech: return n_keywords + 1;
  }
  return n_keywords + 1;
}

inline HierLabel label_from_class_index(std::size_t index, std::size_t n_keywords) {
  if (index < n_keywords) return HierLabel::keyword(index);
  if (index == n_keywords) return HierLabel::non_keyword_speech();
  if (index == n_keywords + 1) return HierLabel::non_speech();
  detail::fail(ErrorCode::kInvalidArgument, "class index ", index, " out of range for N=",
               n_keywords);
}

}  // namespace srkws

#endif  // SRKWS_HIER_LABEL_HPP_
