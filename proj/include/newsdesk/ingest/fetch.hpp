#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <httplib.h>

#include "newsdesk/error.hpp"
#include "newsdesk/url.hpp"

namespace newsdesk::ingest {

struct FetchResponse {
  int status = 200;
  std::string content_type;
  std::string body;
};

// Transport seam for feed and page retrieval. Implementations throw
// Error(UnreachableSource) on transport failure and must tolerate
// concurrent calls.
class Fetcher {
 public:
  virtual ~Fetcher() = default;
  virtual FetchResponse get(const std::string& url) = 0;
};

inline std::string content_type_for(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".xml" || ext == ".rss" || ext == ".atom") return "application/xml";
  if (ext == ".json") return "application/json";
  return "text/plain; charset=utf-8";
}

// Resolves file:// URLs from disk, rewrites configured URL prefixes onto local
// directories (offline fixture mirrors), and sends everything else over
// HTTP(S).
class UrlFetcher final : public Fetcher {
 public:
  explicit UrlFetcher(std::map<std::string, std::filesystem::path> mirrors = {},
                      std::chrono::seconds timeout = std::chrono::seconds{20})
      : mirrors_(std::move(mirrors)), timeout_(timeout) {}

  FetchResponse get(const std::string& url) override {
    for (const auto& [prefix, dir] : mirrors_) {
      if (url.rfind(prefix, 0) == 0) {
        auto rel = url.substr(prefix.size());
        if (const auto q = rel.find_first_of("?#"); q != std::string::npos) rel.resize(q);
        return read_file(dir / rel, url);
      }
    }
    const auto parts = parse_url(url);
    if (!parts) throw Error(ErrorCode::UnreachableSource, "not an absolute URL: " + url);
    if (parts->scheme == "file") return read_file(parts->path, url);
    if (parts->scheme != "http" && parts->scheme != "https")
      throw Error(ErrorCode::UnreachableSource, "unsupported scheme in " + url);
    return http_get(*parts, url);
  }

 private:
  static FetchResponse read_file(const std::filesystem::path& path, const std::string& url) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::UnreachableSource, "cannot read " + path.string() + " for " + url);
    std::ostringstream buf;
    buf << in.rdbuf();
    return {200, content_type_for(path), buf.str()};
  }

  FetchResponse http_get(const UrlParts& parts, const std::string& url) const {
    httplib::Client client(parts.scheme + "://" + parts.authority);
    client.set_follow_location(true);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    auto res = client.Get(parts.path.empty() ? "/" : parts.path);
    if (!res)
      throw Error(ErrorCode::UnreachableSource, url + ": " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
      throw Error(ErrorCode::UnreachableSource, url + ": HTTP " + std::to_string(res->status));
    return {res->status, res->get_header_value("Content-Type"), res->body};
  }

  std::map<std::string, std::filesystem::path> mirrors_;
  std::chrono::seconds timeout_;
};

}  // namespace newsdesk::ingest
