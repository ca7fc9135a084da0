#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include <json.hpp>

#include "newsdesk/error.hpp"
#include "newsdesk/unicode.hpp"

namespace newsdesk::translator {

// English token (normalized) -> Bangla rendering.
using Glossary = std::map<std::string, std::string>;

inline Glossary glossary_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "glossary must be a JSON object");
  Glossary g;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_string()) throw Error(ErrorCode::InvalidConfig, "glossary value for '" + key + "' is not a string");
    g[unicode::to_lower(unicode::nfc(key))] = value.get<std::string>();
  }
  return g;
}

inline Glossary load_glossary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open glossary " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  return glossary_from_json(j);
}

}  // namespace newsdesk::translator
