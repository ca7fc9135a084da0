#pragma once

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>
#include <unicode/locid.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "newsdesk/error.hpp"

namespace newsdesk::unicode {

using CodePoint = char32_t;

inline bool is_valid_utf8(std::string_view s) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(s.data());
  const std::int32_t n = static_cast<std::int32_t>(s.size());
  for (std::int32_t i = 0; i < n;) {
    UChar32 c;
    U8_NEXT(p, i, n, c);
    if (c < 0) return false;
  }
  return true;
}

// Invalid sequences decode to U+FFFD.
inline std::vector<CodePoint> decode(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  const auto* p = reinterpret_cast<const std::uint8_t*>(s.data());
  const std::int32_t n = static_cast<std::int32_t>(s.size());
  for (std::int32_t i = 0; i < n;) {
    UChar32 c;
    U8_NEXT(p, i, n, c);
    out.push_back(c < 0 ? U'�' : static_cast<CodePoint>(c));
  }
  return out;
}

inline void append(std::string& out, CodePoint cp) {
  char buf[U8_MAX_LENGTH];
  std::int32_t len = 0;
  UBool error = false;
  U8_APPEND(reinterpret_cast<std::uint8_t*>(buf), len, U8_MAX_LENGTH,
            static_cast<UChar32>(cp), error);
  if (!error) out.append(buf, static_cast<std::size_t>(len));
}

inline std::string encode(const std::vector<CodePoint>& cps) {
  std::string out;
  out.reserve(cps.size());
  for (CodePoint cp : cps) append(out, cp);
  return out;
}

inline std::size_t length(std::string_view s) {
  std::size_t count = 0;
  const auto* p = reinterpret_cast<const std::uint8_t*>(s.data());
  const std::int32_t n = static_cast<std::int32_t>(s.size());
  for (std::int32_t i = 0; i < n; ++count) {
    UChar32 c;
    U8_NEXT(p, i, n, c);
  }
  return count;
}

inline std::string nfc(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorCode::Io, "ICU NFC normalizer unavailable");
  const auto src = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<std::int32_t>(s.size())));
  if (norm->isNormalized(src, status) && U_SUCCESS(status)) return std::string(s);
  status = U_ZERO_ERROR;
  icu::UnicodeString dst = norm->normalize(src, status);
  if (U_FAILURE(status)) throw Error(ErrorCode::Io, "NFC normalization failed");
  std::string out;
  dst.toUTF8String(out);
  return out;
}

// Full Unicode lowercasing with root-locale rules.
inline std::string to_lower(std::string_view s) {
  auto u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<std::int32_t>(s.size())));
  u.toLower(icu::Locale::getRoot());
  std::string out;
  u.toUTF8String(out);
  return out;
}

inline bool is_whitespace(CodePoint cp) { return u_isUWhiteSpace(static_cast<UChar32>(cp)); }
inline bool is_letter(CodePoint cp) { return u_isalpha(static_cast<UChar32>(cp)); }
inline bool is_upper(CodePoint cp) { return u_isupper(static_cast<UChar32>(cp)); }
inline bool is_digit(CodePoint cp) { return u_isdigit(static_cast<UChar32>(cp)); }
inline bool is_mark(CodePoint cp) {
  return (U_GET_GC_MASK(static_cast<UChar32>(cp)) & U_GC_M_MASK) != 0;
}
inline bool is_number(CodePoint cp) {
  return (U_GET_GC_MASK(static_cast<UChar32>(cp)) & U_GC_N_MASK) != 0;
}
// Letters, marks and numbers make up word tokens; everything else separates.
inline bool is_word_char(CodePoint cp) {
  return (U_GET_GC_MASK(static_cast<UChar32>(cp)) &
          (U_GC_L_MASK | U_GC_M_MASK | U_GC_N_MASK)) != 0;
}

inline bool is_bengali(CodePoint cp) { return cp >= 0x0980 && cp <= 0x09FF; }
inline bool is_ascii_digit(CodePoint cp) { return cp >= U'0' && cp <= U'9'; }
inline bool is_bengali_digit(CodePoint cp) { return cp >= 0x09E6 && cp <= 0x09EF; }

// Collapses Unicode whitespace runs to one ASCII space and trims both ends.
inline std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (CodePoint cp : decode(s)) {
    if (is_whitespace(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    append(out, cp);
  }
  return out;
}

// NFC, lowercase, then split on whitespace, punctuation and symbols. Runs of
// letters, combining marks and numbers form tokens; a run is kept when it
// holds at least one letter or number. No stemming, no stop words.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  if (text.empty()) return tokens;
  const std::string folded = to_lower(nfc(text));
  std::string current;
  bool has_content = false;
  auto flush = [&] {
    if (!current.empty() && has_content) tokens.push_back(std::move(current));
    current.clear();
    has_content = false;
  };
  for (CodePoint cp : decode(folded)) {
    if (!is_word_char(cp)) {
      flush();
      continue;
    }
    if (!is_mark(cp)) has_content = true;
    append(current, cp);
  }
  flush();
  return tokens;
}

}  // namespace newsdesk::unicode
