#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

namespace newsdesk {

struct UrlParts {
  std::string scheme;     // lowercased
  std::string authority;  // host[:port], may be empty for file://
  std::string path;       // begins with '/' or is empty (query kept verbatim)
};

inline std::optional<UrlParts> parse_url(std::string_view url) {
  const auto colon = url.find("://");
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  const auto scheme = url.substr(0, colon);
  if (!std::isalpha(static_cast<unsigned char>(scheme.front()))) return std::nullopt;
  for (char c : scheme) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.')
      return std::nullopt;
  }
  for (char c : url) {
    if (static_cast<unsigned char>(c) <= 0x20) return std::nullopt;
  }
  UrlParts parts;
  parts.scheme.resize(scheme.size());
  std::transform(scheme.begin(), scheme.end(), parts.scheme.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  auto rest = url.substr(colon + 3);
  const auto slash = rest.find_first_of("/?#");
  parts.authority = std::string(rest.substr(0, slash));
  parts.path = slash == std::string_view::npos ? "" : std::string(rest.substr(slash));
  if (parts.scheme == "file") {
    if (parts.path.empty()) return std::nullopt;
  } else if (parts.authority.empty()) {
    return std::nullopt;
  }
  return parts;
}

inline bool is_absolute_url(std::string_view url) { return parse_url(url).has_value(); }

}  // namespace newsdesk
