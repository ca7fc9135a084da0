#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "newsdesk/error.hpp"
#include "newsdesk/unicode.hpp"

namespace newsdesk::features {

// Editorial topics scored by default, in column order.
inline const std::vector<std::string>& default_topics() {
  static const std::vector<std::string> topics{"employment", "immigration", "future-goals",
                                               "housing",    "healthcare",  "politics"};
  return topics;
}

struct TopicLexicon {
  std::string topic;
  std::map<std::string, double> terms;  // normalized token -> weight > 0
};

inline std::string normalize_token(std::string_view token) {
  return unicode::to_lower(unicode::nfc(token));
}

inline void validate(const std::vector<TopicLexicon>& lexicons) {
  std::set<std::string> names;
  for (const auto& lex : lexicons) {
    if (lex.topic.empty()) throw Error(ErrorCode::InvalidConfig, "lexicon with empty topic name");
    if (!names.insert(lex.topic).second)
      throw Error(ErrorCode::InvalidConfig, "duplicate lexicon topic '" + lex.topic + "'");
    for (const auto& [token, weight] : lex.terms) {
      if (!(weight > 0.0))
        throw Error(ErrorCode::InvalidConfig, "lexicon '" + lex.topic + "': weight for '" + token + "' must be > 0");
      if (token != normalize_token(token))
        throw Error(ErrorCode::InvalidConfig, "lexicon '" + lex.topic + "': token '" + token + "' not normalized");
    }
  }
}

// JSON: [{"topic": ..., "terms": [{"token": ..., "weight": ...}]}]. Tokens
// are normalized on load.
inline std::vector<TopicLexicon> lexicons_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidConfig, "lexicon file must be a JSON array");
  std::vector<TopicLexicon> out;
  try {
    for (const auto& entry : j) {
      TopicLexicon lex;
      lex.topic = entry.at("topic").get<std::string>();
      for (const auto& term : entry.at("terms")) {
        const auto token = normalize_token(term.at("token").get<std::string>());
        lex.terms[token] = term.at("weight").get<double>();
      }
      out.push_back(std::move(lex));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("lexicon file: ") + e.what());
  }
  validate(out);
  return out;
}

inline nlohmann::json to_json(const std::vector<TopicLexicon>& lexicons) {
  auto arr = nlohmann::json::array();
  for (const auto& lex : lexicons) {
    auto terms = nlohmann::json::array();
    for (const auto& [token, weight] : lex.terms) terms.push_back({{"token", token}, {"weight", weight}});
    arr.push_back({{"topic", lex.topic}, {"terms", terms}});
  }
  return arr;
}

inline std::vector<TopicLexicon> load_lexicons(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open lexicon file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  return lexicons_from_json(j);
}

inline std::vector<std::string> topic_names(const std::vector<TopicLexicon>& lexicons) {
  std::vector<std::string> names;
  for (const auto& lex : lexicons) names.push_back(lex.topic);
  return names;
}

}  // namespace newsdesk::features
