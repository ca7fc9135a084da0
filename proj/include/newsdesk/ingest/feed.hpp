#pragma once

#include <expat.h>

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "newsdesk/error.hpp"
#include "newsdesk/ingest/fetch.hpp"
#include "newsdesk/ingest/source.hpp"
#include "newsdesk/time.hpp"
#include "newsdesk/unicode.hpp"
#include "newsdesk/url.hpp"

namespace newsdesk::ingest {

struct ArticleStub {
  std::string source_id;
  std::string url;
  std::string title;
  std::optional<Timestamp> published_at;
  std::string raw_payload;
  std::string content_type;
};

// A feed entry or page that was skipped; the rest of the feed still counts.
struct FeedIssue {
  ErrorCode code;
  std::string source_id;
  std::string subject;  // item url when known
  std::int64_t byte_offset = -1;
  std::string reason;
};

struct FeedParse {
  std::vector<ArticleStub> stubs;  // raw_payload empty at this stage
  std::vector<FeedIssue> issues;
};

namespace detail {

inline std::string_view local_name(const XML_Char* name) {
  std::string_view n(name);
  const auto colon = n.rfind(':');
  return colon == std::string_view::npos ? n : n.substr(colon + 1);
}

inline std::string trim(std::string_view s) { return unicode::collapse_whitespace(s); }

class FeedHandler {
 public:
  FeedHandler(XML_Parser parser, std::string source_id)
      : parser_(parser), source_id_(std::move(source_id)) {}

  void start(const XML_Char* name, const XML_Char** attrs) {
    const auto local = local_name(name);
    ++depth_;
    if (depth_ == 1) {
      if (local == "rss" || local == "RDF") kind_ = Kind::Rss;
      else if (local == "feed") kind_ = Kind::Atom;
      else bad_root_ = std::string(local);
      return;
    }
    const bool entry_tag = (kind_ == Kind::Rss && local == "item") ||
                           (kind_ == Kind::Atom && local == "entry");
    if (!in_item_ && entry_tag) {
      in_item_ = true;
      item_depth_ = depth_;
      item_ = {};
      item_offset_ = XML_GetCurrentByteIndex(parser_);
      return;
    }
    if (in_item_ && depth_ == item_depth_ + 1) {
      field_ = std::string(local);
      text_.clear();
      if (kind_ == Kind::Atom && local == "link") {
        std::string href, rel;
        for (int i = 0; attrs[i]; i += 2) {
          const std::string_view key(attrs[i]);
          if (key == "href") href = attrs[i + 1];
          else if (key == "rel") rel = attrs[i + 1];
        }
        if (!href.empty() && (rel.empty() || rel == "alternate") && item_.link.empty())
          item_.link = trim(href);
      }
    }
  }

  void end(const XML_Char* name) {
    const auto local = local_name(name);
    if (in_item_ && depth_ == item_depth_ + 1) {
      const auto value = trim(text_);
      if (local == "title") item_.title = value;
      else if (local == "link" && kind_ == Kind::Rss) item_.link = value;
      else if (local == "pubDate" || local == "published" || local == "date") item_.published = value;
      else if (local == "updated" && item_.published.empty()) item_.published = value;
      field_.clear();
    } else if (in_item_ && depth_ == item_depth_) {
      finish_item();
      in_item_ = false;
    }
    --depth_;
  }

  void text(const XML_Char* s, int len) {
    if (in_item_ && !field_.empty() && depth_ == item_depth_ + 1) text_.append(s, static_cast<std::size_t>(len));
  }

  const std::optional<std::string>& bad_root() const { return bad_root_; }
  FeedParse take() { return std::move(result_); }

 private:
  enum class Kind { Unknown, Rss, Atom };
  struct Item {
    std::string title, link, published;
  };

  void finish_item() {
    if (item_.link.empty()) {
      result_.issues.push_back({ErrorCode::MalformedFeed, source_id_, item_.title, item_offset_,
                                "item has no link"});
      return;
    }
    if (!is_absolute_url(item_.link)) {
      result_.issues.push_back({ErrorCode::MalformedFeed, source_id_, item_.link, item_offset_,
                                "item link is not an absolute URL"});
      return;
    }
    if (!seen_.insert(item_.link).second) {
      result_.issues.push_back({ErrorCode::MalformedFeed, source_id_, item_.link, item_offset_,
                                "duplicate item link"});
      return;
    }
    ArticleStub stub;
    stub.source_id = source_id_;
    stub.url = item_.link;
    stub.title = item_.title;
    if (!item_.published.empty()) stub.published_at = parse_timestamp(item_.published);
    result_.stubs.push_back(std::move(stub));
  }

  XML_Parser parser_;
  std::string source_id_;
  Kind kind_ = Kind::Unknown;
  std::optional<std::string> bad_root_;
  int depth_ = 0;
  bool in_item_ = false;
  int item_depth_ = 0;
  std::int64_t item_offset_ = 0;
  Item item_;
  std::string field_;
  std::string text_;
  std::set<std::string> seen_;
  FeedParse result_;
};

}  // namespace detail

// Parses an RSS 2.0 (or RSS 1.0/RDF) or Atom 1.0 document. Entries come back
// in document order. Entries without a usable link are reported as issues;
// a document that is not well-formed XML or has an unknown root element
// throws MalformedFeed with the byte offset in the message.
inline FeedParse parse_feed(std::string_view source_id, std::string_view xml) {
  XML_Parser parser = XML_ParserCreate(nullptr);
  if (!parser) throw Error(ErrorCode::Io, "cannot allocate XML parser");
  struct Guard {
    XML_Parser p;
    ~Guard() { XML_ParserFree(p); }
  } guard{parser};

  detail::FeedHandler handler(parser, std::string(source_id));
  XML_SetUserData(parser, &handler);
  XML_SetElementHandler(
      parser,
      [](void* ud, const XML_Char* name, const XML_Char** attrs) {
        static_cast<detail::FeedHandler*>(ud)->start(name, attrs);
      },
      [](void* ud, const XML_Char* name) { static_cast<detail::FeedHandler*>(ud)->end(name); });
  XML_SetCharacterDataHandler(parser, [](void* ud, const XML_Char* s, int len) {
    static_cast<detail::FeedHandler*>(ud)->text(s, len);
  });

  if (XML_Parse(parser, xml.data(), static_cast<int>(xml.size()), XML_TRUE) == XML_STATUS_ERROR) {
    const auto offset = XML_GetCurrentByteIndex(parser);
    throw Error(ErrorCode::MalformedFeed,
                "source '" + std::string(source_id) + "' at byte " + std::to_string(offset) + ": " +
                    XML_ErrorString(XML_GetErrorCode(parser)));
  }
  if (handler.bad_root())
    throw Error(ErrorCode::MalformedFeed, "source '" + std::string(source_id) +
                                              "' at byte 0: root element <" + *handler.bad_root() +
                                              "> is not rss, RDF or feed");
  return handler.take();
}

struct FeedResult {
  std::vector<ArticleStub> stubs;
  std::vector<FeedIssue> issues;
};

// Fetches the source's feed, then each entry's page. A failing page becomes
// an issue; a failing feed throws (UnreachableSource or MalformedFeed) so the
// caller can record it and move on to the next source.
inline FeedResult fetch_feed(const Source& source, Fetcher& fetcher) {
  if (!source.enabled)
    throw Error(ErrorCode::InvalidSource, "source '" + source.id + "' is disabled");
  const auto feed = fetcher.get(source.feed_url);
  auto parsed = parse_feed(source.id, feed.body);
  FeedResult result;
  result.issues = std::move(parsed.issues);
  for (auto& stub : parsed.stubs) {
    try {
      auto page = fetcher.get(stub.url);
      stub.raw_payload = std::move(page.body);
      stub.content_type = std::move(page.content_type);
      result.stubs.push_back(std::move(stub));
    } catch (const Error& e) {
      result.issues.push_back({e.code(), source.id, stub.url, -1, e.detail()});
    }
  }
  return result;
}

}  // namespace newsdesk::ingest
