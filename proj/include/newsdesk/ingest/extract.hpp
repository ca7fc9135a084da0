#pragma once

#include <unicode/ucnv.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "newsdesk/error.hpp"
#include "newsdesk/unicode.hpp"

namespace newsdesk::ingest {

struct Extracted {
  std::string title;
  std::string body;  // paragraphs separated by '\n'
};

namespace detail {

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline std::string charset_param(std::string_view text) {
  const auto lower = ascii_lower(text);
  const auto pos = lower.find("charset=");
  if (pos == std::string::npos) return {};
  std::size_t i = pos + 8;
  while (i < lower.size() && (lower[i] == '"' || lower[i] == '\'' || lower[i] == ' ')) ++i;
  std::size_t j = i;
  while (j < lower.size() && (std::isalnum(static_cast<unsigned char>(lower[j])) || lower[j] == '-' ||
                              lower[j] == '_' || lower[j] == ':' || lower[j] == '.'))
    ++j;
  return lower.substr(i, j - i);
}

inline bool is_utf8_name(std::string_view cs) { return cs == "utf-8" || cs == "utf8"; }

// UTF-8 first; otherwise convert from the declared charset; otherwise reject.
inline std::string decode_payload(std::string_view raw, std::string_view content_type, bool html) {
  if (raw.size() >= 3 && raw.substr(0, 3) == "\xEF\xBB\xBF") raw.remove_prefix(3);
  if (unicode::is_valid_utf8(raw)) return std::string(raw);
  std::string declared = charset_param(content_type);
  if (declared.empty() && html) declared = charset_param(raw.substr(0, std::min<std::size_t>(raw.size(), 2048)));
  if (declared.empty() || is_utf8_name(declared))
    throw Error(ErrorCode::UndecodablePayload, "payload is not valid UTF-8 and declares no other charset");
  UErrorCode status = U_ZERO_ERROR;
  UConverter* conv = ucnv_open(declared.c_str(), &status);
  if (U_FAILURE(status) || !conv)
    throw Error(ErrorCode::UndecodablePayload, "unsupported charset '" + declared + "'");
  ucnv_setToUCallBack(conv, UCNV_TO_U_CALLBACK_STOP, nullptr, nullptr, nullptr, &status);
  icu::UnicodeString u;
  {
    std::vector<UChar> buf(raw.size() * 2 + 16);
    const auto n = ucnv_toUChars(conv, buf.data(), static_cast<int32_t>(buf.size()), raw.data(),
                                 static_cast<int32_t>(raw.size()), &status);
    ucnv_close(conv);
    if (U_FAILURE(status))
      throw Error(ErrorCode::UndecodablePayload, "payload does not decode as '" + declared + "'");
    u = icu::UnicodeString(buf.data(), n);
  }
  std::string out;
  u.toUTF8String(out);
  return out;
}

// Collapses whitespace inside each line, drops blank lines, joins with '\n'.
inline std::string normalize_paragraphs(std::string_view text) {
  std::string out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = unicode::collapse_whitespace(text.substr(start, nl - start));
    if (!line.empty()) {
      if (!out.empty()) out.push_back('\n');
      out += line;
    }
    start = nl + 1;
  }
  return out;
}

inline void append_entity(std::string& out, std::string_view html, std::size_t& i) {
  // html[i] == '&'
  const auto semi = html.find(';', i);
  if (semi == std::string_view::npos || semi - i > 12) {
    out.push_back('&');
    ++i;
    return;
  }
  const auto name = html.substr(i + 1, semi - i - 1);
  char32_t cp = 0;
  if (!name.empty() && name[0] == '#') {
    try {
      if (name.size() > 1 && (name[1] == 'x' || name[1] == 'X'))
        cp = static_cast<char32_t>(std::stoul(std::string(name.substr(2)), nullptr, 16));
      else
        cp = static_cast<char32_t>(std::stoul(std::string(name.substr(1)), nullptr, 10));
    } catch (...) {
      cp = 0;
    }
  } else {
    static constexpr std::array<std::pair<std::string_view, char32_t>, 16> kNamed{{
        {"amp", U'&'}, {"lt", U'<'}, {"gt", U'>'}, {"quot", U'"'}, {"apos", U'\''},
        {"nbsp", 0xA0}, {"mdash", 0x2014}, {"ndash", 0x2013}, {"hellip", 0x2026},
        {"lsquo", 0x2018}, {"rsquo", 0x2019}, {"ldquo", 0x201C}, {"rdquo", 0x201D},
        {"copy", 0xA9}, {"reg", 0xAE}, {"middot", 0xB7},
    }};
    for (const auto& [n, v] : kNamed)
      if (n == name) cp = v;
  }
  if (cp == 0 || cp > 0x10FFFF) {
    out.append(html.substr(i, semi - i + 1));
  } else {
    unicode::append(out, cp);
  }
  i = semi + 1;
}

inline bool one_of(std::string_view name, std::initializer_list<std::string_view> set) {
  return std::find(set.begin(), set.end(), name) != set.end();
}

struct Tag {
  std::string name;  // lowercased
  bool closing = false;
  bool self_closing = false;
  std::string role;
};

// Parses a tag starting at html[i] == '<'; advances i past '>'.
inline Tag read_tag(std::string_view html, std::size_t& i) {
  Tag tag;
  std::size_t p = i + 1;
  if (p < html.size() && html[p] == '/') {
    tag.closing = true;
    ++p;
  }
  const std::size_t name_start = p;
  while (p < html.size() && (std::isalnum(static_cast<unsigned char>(html[p])) || html[p] == '-' || html[p] == ':')) ++p;
  tag.name = ascii_lower(html.substr(name_start, p - name_start));
  // attributes, respecting quotes
  std::string attrs;
  char quote = 0;
  while (p < html.size()) {
    const char c = html[p];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '>') {
      break;
    }
    attrs.push_back(c);
    ++p;
  }
  i = p < html.size() ? p + 1 : html.size();
  if (!attrs.empty() && attrs.back() == '/') tag.self_closing = true;
  const auto lower = ascii_lower(attrs);
  if (const auto r = lower.find("role="); r != std::string::npos) {
    std::size_t q = r + 5;
    if (q < lower.size() && (lower[q] == '"' || lower[q] == '\'')) ++q;
    std::size_t e = q;
    while (e < lower.size() && std::isalpha(static_cast<unsigned char>(lower[e]))) ++e;
    tag.role = lower.substr(q, e - q);
  }
  return tag;
}

inline std::string extract_html(std::string_view html, std::string& title) {
  std::string text;
  std::vector<std::pair<std::string, int>> skip;  // open boilerplate element and nesting
  bool in_title = false;
  std::string title_buf;
  std::size_t i = 0;
  while (i < html.size()) {
    const char c = html[i];
    if (c == '<') {
      if (html.compare(i, 4, "<!--") == 0) {
        const auto end = html.find("-->", i + 4);
        i = end == std::string_view::npos ? html.size() : end + 3;
        continue;
      }
      if (i + 1 < html.size() && (html[i + 1] == '!' || html[i + 1] == '?')) {
        const auto end = html.find('>', i);
        i = end == std::string_view::npos ? html.size() : end + 1;
        continue;
      }
      if (i + 1 >= html.size() ||
          !(std::isalpha(static_cast<unsigned char>(html[i + 1])) || html[i + 1] == '/')) {
        (in_title ? title_buf : text).push_back('<');
        ++i;
        continue;
      }
      const Tag tag = read_tag(html, i);
      if (!tag.closing && one_of(tag.name, {"script", "style", "noscript", "template", "svg", "iframe"})) {
        if (tag.self_closing) continue;
        const auto lower_rest = ascii_lower(html.substr(i));
        const auto end = lower_rest.find("</" + tag.name);
        if (end == std::string::npos) {
          i = html.size();
        } else {
          i += end;
          const auto gt = html.find('>', i);
          i = gt == std::string_view::npos ? html.size() : gt + 1;
        }
        continue;
      }
      if (tag.name == "title") {
        in_title = !tag.closing;
        if (tag.closing && title.empty()) title = unicode::collapse_whitespace(title_buf);
        continue;
      }
      if (!skip.empty() && tag.name == skip.back().first) {
        if (tag.closing) {
          if (--skip.back().second == 0) skip.pop_back();
        } else if (!tag.self_closing) {
          ++skip.back().second;
        }
        continue;
      }
      if (!tag.closing && !tag.self_closing &&
          (one_of(tag.name, {"nav", "header", "footer", "aside", "form", "menu", "button", "select"}) ||
           one_of(tag.role, {"navigation", "banner", "contentinfo", "menu", "search"}))) {
        skip.emplace_back(tag.name, 1);
        continue;
      }
      if (one_of(tag.name, {"p", "div", "br", "h1", "h2", "h3", "h4", "h5", "h6", "li", "ul", "ol",
                            "article", "section", "blockquote", "tr", "table", "pre", "hr", "dd",
                            "dt", "dl", "figcaption", "figure", "main", "body", "td", "th"})) {
        text.push_back('\n');
      }
      continue;
    }
    std::string& sink = in_title ? title_buf : text;
    if (!in_title && !skip.empty()) {
      ++i;
      continue;
    }
    if (c == '&') {
      append_entity(sink, html, i);
      continue;
    }
    // Source line breaks are plain whitespace in HTML; only block tags break paragraphs.
    sink.push_back(c == '\n' || c == '\r' || c == '\t' ? ' ' : c);
    ++i;
  }
  if (in_title && title.empty()) title = unicode::collapse_whitespace(title_buf);
  return normalize_paragraphs(text);
}

inline bool looks_like_html(std::string_view content_type, std::string_view payload) {
  const auto ct = ascii_lower(content_type);
  if (ct.find("html") != std::string::npos || ct.find("xml") != std::string::npos) return true;
  if (ct.find("text/plain") != std::string::npos) return false;
  const auto first = payload.find_first_not_of(" \t\r\n");
  return first != std::string_view::npos && payload[first] == '<';
}

}  // namespace detail

// Returns the document title (HTML only) and the readable body text:
// markup, script/style content and navigation chrome removed, whitespace
// runs collapsed to one space, paragraph breaks kept as '\n'. Plain text is
// only whitespace-normalized, so feeding the body back in returns it
// unchanged.
inline Extracted extract_text(std::string_view raw_payload, std::string_view content_type) {
  const bool html = detail::looks_like_html(content_type, raw_payload);
  const std::string decoded = detail::decode_payload(raw_payload, content_type, html);
  Extracted out;
  out.body = html ? detail::extract_html(decoded, out.title) : detail::normalize_paragraphs(decoded);
  if (out.body.empty()) throw Error(ErrorCode::EmptyAfterExtraction, "no text left after extraction");
  return out;
}

}  // namespace newsdesk::ingest
