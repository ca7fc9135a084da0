#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "newsdesk/error.hpp"
#include "newsdesk/url.hpp"

namespace newsdesk::ingest {

// A news provider and the operator's permission decision for it.
struct Source {
  std::string id;
  std::string name;
  std::string feed_url;
  std::string homepage_url;
  std::string language = "en";
  bool republish_permitted = false;
  std::string license_note;
  bool enabled = true;

  friend bool operator==(const Source&, const Source&) = default;
};

inline constexpr std::string_view kSourceFields[] = {
    "id", "name", "feed_url", "homepage_url", "language",
    "republish_permitted", "license_note", "enabled"};

inline void validate(const Source& s) {
  if (s.id.empty()) throw Error(ErrorCode::InvalidSource, "source id is empty");
  if (!is_absolute_url(s.feed_url))
    throw Error(ErrorCode::InvalidSource, "source '" + s.id + "': feed_url is not an absolute URL");
  if (!is_absolute_url(s.homepage_url))
    throw Error(ErrorCode::InvalidSource, "source '" + s.id + "': homepage_url is not an absolute URL");
}

inline nlohmann::json to_json(const Source& s) {
  return {{"id", s.id},
          {"name", s.name},
          {"feed_url", s.feed_url},
          {"homepage_url", s.homepage_url},
          {"language", s.language},
          {"republish_permitted", s.republish_permitted},
          {"license_note", s.license_note},
          {"enabled", s.enabled}};
}

// Strict: every field must be present with the right type and no others are
// allowed, so a misspelt "republish_permited" is an error instead of a
// silently-false permission.
inline Source source_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidSource, "source entry is not an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(kSourceFields), std::end(kSourceFields), key) == std::end(kSourceFields))
      throw Error(ErrorCode::InvalidSource, "unknown source field '" + key + "'");
  }
  auto str = [&](const char* key) -> std::string {
    if (!j.contains(key) || !j[key].is_string())
      throw Error(ErrorCode::InvalidSource, std::string("field '") + key + "' must be a string");
    return j[key].get<std::string>();
  };
  auto flag = [&](const char* key) -> bool {
    if (!j.contains(key) || !j[key].is_boolean())
      throw Error(ErrorCode::InvalidSource, std::string("field '") + key + "' must be a boolean");
    return j[key].get<bool>();
  };
  Source s;
  s.id = str("id");
  s.name = str("name");
  s.feed_url = str("feed_url");
  s.homepage_url = str("homepage_url");
  s.language = str("language");
  s.republish_permitted = flag("republish_permitted");
  s.license_note = str("license_note");
  s.enabled = flag("enabled");
  validate(s);
  return s;
}

enum class DenyReason { Disabled, NoRepublishPermission };

constexpr std::string_view to_string(DenyReason r) {
  return r == DenyReason::Disabled ? "disabled" : "no_republish_permission";
}

struct Allow {};
struct Deny {
  DenyReason reason;
};
using GateDecision = std::variant<Allow, Deny>;

inline bool allowed(const GateDecision& d) { return std::holds_alternative<Allow>(d); }

// Conjunction of the two operator flags. A disabled source reports
// `disabled` even if it also lacks permission.
inline GateDecision gatekeep(const Source& s) {
  if (!s.enabled) return Deny{DenyReason::Disabled};
  if (!s.republish_permitted) return Deny{DenyReason::NoRepublishPermission};
  return Allow{};
}

// Partial update accepted by PATCH /api/sources/{id}.
struct SourcePatch {
  std::optional<bool> enabled;
  std::optional<bool> republish_permitted;
  std::optional<std::string> license_note;
};

class SourceRegistry {
 public:
  SourceRegistry() = default;
  explicit SourceRegistry(std::vector<Source> sources) {
    for (auto& s : sources) add(std::move(s));
  }

  static SourceRegistry from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw Error(ErrorCode::InvalidSource, "source registry must be a JSON array");
    SourceRegistry reg;
    for (const auto& entry : j) reg.add(source_from_json(entry));
    return reg;
  }

  static SourceRegistry load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open source registry " + path.string());
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidSource, path.string() + ": " + e.what());
    }
    return from_json(j);
  }

  nlohmann::json to_json() const {
    auto arr = nlohmann::json::array();
    for (const auto& s : sources_) arr.push_back(ingest::to_json(s));
    return arr;
  }

  // Writes to a sibling temp file then renames over the target.
  void save(const std::filesystem::path& path) const {
    const auto tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp);
      out << to_json().dump(2) << '\n';
    }
    std::filesystem::rename(tmp, path);
  }

  void add(Source s) {
    validate(s);
    if (find(s.id)) throw Error(ErrorCode::InvalidSource, "duplicate source id '" + s.id + "'");
    sources_.push_back(std::move(s));
  }

  const Source* find(std::string_view id) const {
    auto it = std::find_if(sources_.begin(), sources_.end(),
                           [&](const Source& s) { return s.id == id; });
    return it == sources_.end() ? nullptr : &*it;
  }

  const Source& get(std::string_view id) const {
    if (const auto* s = find(id)) return *s;
    throw Error(ErrorCode::UnknownSource, "no source with id '" + std::string(id) + "'");
  }

  const Source& patch(std::string_view id, const SourcePatch& p) {
    auto it = std::find_if(sources_.begin(), sources_.end(),
                           [&](const Source& s) { return s.id == id; });
    if (it == sources_.end())
      throw Error(ErrorCode::UnknownSource, "no source with id '" + std::string(id) + "'");
    if (p.enabled) it->enabled = *p.enabled;
    if (p.republish_permitted) it->republish_permitted = *p.republish_permitted;
    if (p.license_note) it->license_note = *p.license_note;
    return *it;
  }

  GateDecision gatekeep(std::string_view id) const { return ingest::gatekeep(get(id)); }

  const std::vector<Source>& sources() const noexcept { return sources_; }
  std::size_t size() const noexcept { return sources_.size(); }

 private:
  std::vector<Source> sources_;
};

}  // namespace newsdesk::ingest
