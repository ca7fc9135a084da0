#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "newsdesk/error.hpp"
#include "newsdesk/hash.hpp"
#include "newsdesk/time.hpp"
#include "newsdesk/unicode.hpp"

namespace newsdesk::ingest {

// One stored news item; a row of the feature matrix once featurized.
struct Article {
  std::string id;
  std::string source_id;
  std::string url;
  std::string title;
  std::string body;
  std::string language = "en";
  std::optional<Timestamp> published_at;
  Timestamp fetched_at{};
  std::uint64_t dedup_hash = 0;
  std::optional<std::string> class_label;
  // Topic relevance scores computed at ingest, keyed by topic name.
  std::map<std::string, double> topic_scores;

  friend bool operator==(const Article&, const Article&) = default;
};

// NFC, lowercase, whitespace runs collapsed.
inline std::string normalize_for_dedup(std::string_view body) {
  return unicode::collapse_whitespace(unicode::to_lower(unicode::nfc(body)));
}

inline std::uint64_t dedup_key(std::string_view body) { return fnv1a64(normalize_for_dedup(body)); }

// Article ids are the hex dedup key; unique as long as bodies are.
inline std::string article_id_for(std::uint64_t dedup_hash) { return "a" + to_hex(dedup_hash); }

inline nlohmann::json to_json(const Article& a) {
  nlohmann::json j{{"id", a.id},
                   {"source_id", a.source_id},
                   {"url", a.url},
                   {"title", a.title},
                   {"body", a.body},
                   {"language", a.language},
                   {"published_at", nullptr},
                   {"fetched_at", format_iso8601(a.fetched_at)},
                   {"dedup_hash", to_hex(a.dedup_hash)},
                   {"class_label", nullptr},
                   {"topic_scores", a.topic_scores}};
  if (a.published_at) j["published_at"] = format_iso8601(*a.published_at);
  if (a.class_label) j["class_label"] = *a.class_label;
  return j;
}

inline Article article_from_json(const nlohmann::json& j) {
  try {
    Article a;
    a.id = j.at("id").get<std::string>();
    a.source_id = j.at("source_id").get<std::string>();
    a.url = j.at("url").get<std::string>();
    a.title = j.at("title").get<std::string>();
    a.body = j.at("body").get<std::string>();
    a.language = j.value("language", "en");
    if (j.contains("published_at") && j["published_at"].is_string())
      a.published_at = parse_iso8601(j["published_at"].get<std::string>());
    const auto fetched = parse_iso8601(j.at("fetched_at").get<std::string>());
    if (!fetched) throw Error(ErrorCode::StoreCorrupt, "bad fetched_at in article " + a.id);
    a.fetched_at = *fetched;
    a.dedup_hash = std::stoull(j.at("dedup_hash").get<std::string>(), nullptr, 16);
    if (j.contains("class_label") && j["class_label"].is_string())
      a.class_label = j["class_label"].get<std::string>();
    if (j.contains("topic_scores"))
      a.topic_scores = j["topic_scores"].get<std::map<std::string, double>>();
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::StoreCorrupt, std::string("article record: ") + e.what());
  }
}

// Text used for features and search: title and body.
inline std::string searchable_text(const Article& a) { return a.title + "\n" + a.body; }

}  // namespace newsdesk::ingest
