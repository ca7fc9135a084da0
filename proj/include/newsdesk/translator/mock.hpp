#pragma once

#include <string>
#include <string_view>

#include "newsdesk/translator/glossary.hpp"
#include "newsdesk/unicode.hpp"

namespace newsdesk::translator {

inline constexpr std::string_view kUnknownOpen = "⟨";   // ⟨
inline constexpr std::string_view kUnknownClose = "⟩";  // ⟩

// Deterministic stand-in for a translation model. Word tokens found in the
// glossary are replaced, all-digit tokens and every non-word character are
// copied, and any other word is emitted verbatim inside ⟨ ⟩.
inline std::string mock_translate(std::string_view text, const Glossary& glossary) {
  std::string out;
  out.reserve(text.size() * 2);
  const auto cps = unicode::decode(text);
  std::size_t i = 0;
  while (i < cps.size()) {
    if (!unicode::is_word_char(cps[i])) {
      unicode::append(out, cps[i]);
      ++i;
      continue;
    }
    std::size_t j = i;
    bool numeric = true;
    std::string word;
    for (; j < cps.size() && unicode::is_word_char(cps[j]); ++j) {
      if (!unicode::is_digit(cps[j]) && !unicode::is_mark(cps[j])) numeric = false;
      unicode::append(word, cps[j]);
    }
    i = j;
    if (numeric) {
      out += word;
      continue;
    }
    if (auto it = glossary.find(unicode::to_lower(unicode::nfc(word))); it != glossary.end()) {
      out += it->second;
    } else {
      out += kUnknownOpen;
      out += word;
      out += kUnknownClose;
    }
  }
  return out;
}

}  // namespace newsdesk::translator
