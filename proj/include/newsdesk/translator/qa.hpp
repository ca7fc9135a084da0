#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "newsdesk/unicode.hpp"

namespace newsdesk::translator {

inline constexpr double kMinLengthRatio = 0.3;
inline constexpr double kMaxLengthRatio = 3.0;
inline constexpr double kMinBengaliLetterShare = 0.5;

// Automatic checks on one translation. Entity preservation is advisory and
// does not affect `passed`.
struct QAReport {
  bool numerals_preserved = true;
  std::vector<std::string> missing_numerals;
  bool entities_preserved = true;
  std::vector<std::string> missing_entities;
  bool script_ok = false;
  double bengali_letter_share = 0.0;
  double length_ratio = 0.0;
  bool passed = false;

  friend bool operator==(const QAReport&, const QAReport&) = default;
};

namespace detail {

// Maximal digit runs with Bengali digits mapped to their ASCII value.
inline std::vector<std::string> digit_runs(std::string_view text, bool accept_bengali) {
  std::vector<std::string> runs;
  std::string current;
  for (auto cp : unicode::decode(text)) {
    if (unicode::is_ascii_digit(cp)) {
      current.push_back(static_cast<char>(cp));
    } else if (accept_bengali && unicode::is_bengali_digit(cp)) {
      current.push_back(static_cast<char>('0' + (cp - 0x09E6)));
    } else if (!current.empty()) {
      runs.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) runs.push_back(std::move(current));
  return runs;
}

// Tokens starting with an uppercase letter and holding two or more letters.
inline std::vector<std::string> capitalized_tokens(std::string_view text) {
  std::vector<std::string> out;
  const auto cps = unicode::decode(text);
  std::size_t i = 0;
  while (i < cps.size()) {
    if (!unicode::is_word_char(cps[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    std::size_t letters = 0;
    std::string word;
    for (; j < cps.size() && unicode::is_word_char(cps[j]); ++j) {
      if (unicode::is_letter(cps[j])) ++letters;
      unicode::append(word, cps[j]);
    }
    if (unicode::is_upper(cps[i]) && letters >= 2 && std::find(out.begin(), out.end(), word) == out.end())
      out.push_back(std::move(word));
    i = j;
  }
  return out;
}

}  // namespace detail

inline QAReport qa_check(std::string_view source, std::string_view output) {
  QAReport r;

  const auto output_runs = detail::digit_runs(output, true);
  for (const auto& run : detail::digit_runs(source, false)) {
    if (std::find(output_runs.begin(), output_runs.end(), run) == output_runs.end() &&
        std::find(r.missing_numerals.begin(), r.missing_numerals.end(), run) == r.missing_numerals.end())
      r.missing_numerals.push_back(run);
  }
  r.numerals_preserved = r.missing_numerals.empty();

  // A verbatim occurrence also covers the ⟨Name⟩ form.
  for (const auto& entity : detail::capitalized_tokens(source))
    if (output.find(entity) == std::string_view::npos) r.missing_entities.push_back(entity);
  r.entities_preserved = r.missing_entities.empty();

  std::size_t letters = 0, bengali = 0;
  for (auto cp : unicode::decode(output)) {
    if (!unicode::is_letter(cp)) continue;
    ++letters;
    if (unicode::is_bengali(cp)) ++bengali;
  }
  r.bengali_letter_share = letters == 0 ? 0.0 : static_cast<double>(bengali) / static_cast<double>(letters);
  r.script_ok = letters > 0 && r.bengali_letter_share >= kMinBengaliLetterShare;

  const auto source_len = unicode::length(source);
  r.length_ratio = source_len == 0 ? 0.0 : static_cast<double>(unicode::length(output)) / static_cast<double>(source_len);

  r.passed = r.numerals_preserved && r.script_ok && r.length_ratio >= kMinLengthRatio &&
             r.length_ratio <= kMaxLengthRatio;
  return r;
}

inline nlohmann::json to_json(const QAReport& r) {
  return {{"numerals_preserved", r.numerals_preserved}, {"missing_numerals", r.missing_numerals},
          {"entities_preserved", r.entities_preserved}, {"missing_entities", r.missing_entities},
          {"script_ok", r.script_ok},                   {"bengali_letter_share", r.bengali_letter_share},
          {"length_ratio", r.length_ratio},             {"passed", r.passed}};
}

inline QAReport qa_from_json(const nlohmann::json& j) {
  QAReport r;
  r.numerals_preserved = j.at("numerals_preserved").get<bool>();
  r.missing_numerals = j.at("missing_numerals").get<std::vector<std::string>>();
  r.entities_preserved = j.at("entities_preserved").get<bool>();
  r.missing_entities = j.at("missing_entities").get<std::vector<std::string>>();
  r.script_ok = j.at("script_ok").get<bool>();
  r.bengali_letter_share = j.value("bengali_letter_share", 0.0);
  r.length_ratio = j.at("length_ratio").get<double>();
  r.passed = j.at("passed").get<bool>();
  return r;
}

}  // namespace newsdesk::translator
