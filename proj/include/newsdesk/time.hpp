#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <locale>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

namespace newsdesk {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

inline Timestamp now_utc() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(
      std::chrono::system_clock::now());
}

// "YYYY-MM-DDTHH:MM:SS.mmmZ"
inline std::string format_iso8601(Timestamp t) {
  const auto secs = std::chrono::floor<std::chrono::seconds>(t);
  const auto millis = (t - secs).count();
  const std::time_t tt = std::chrono::system_clock::to_time_t(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec, static_cast<int>(millis));
  return buf;
}

namespace detail {

inline std::optional<Timestamp> from_tm(std::tm tm, long offset_seconds,
                                        int millis) {
  const std::time_t t = timegm(&tm);
  if (t == static_cast<std::time_t>(-1)) return std::nullopt;
  return Timestamp{std::chrono::milliseconds{
      (static_cast<long long>(t) - offset_seconds) * 1000LL + millis}};
}

// Parses "Z", "+HH:MM", "-HHMM", "GMT", "UT", "EST" and friends.
inline std::optional<long> parse_zone(std::string_view z) {
  while (!z.empty() && z.front() == ' ') z.remove_prefix(1);
  if (z.empty() || z == "Z" || z == "GMT" || z == "UT" || z == "UTC") return 0L;
  if (z == "EST") return -5L * 3600;
  if (z == "EDT") return -4L * 3600;
  if (z == "CST") return -6L * 3600;
  if (z == "CDT") return -5L * 3600;
  if (z == "MST") return -7L * 3600;
  if (z == "MDT") return -6L * 3600;
  if (z == "PST") return -8L * 3600;
  if (z == "PDT") return -7L * 3600;
  if (z.front() != '+' && z.front() != '-') return std::nullopt;
  const int sign = z.front() == '-' ? -1 : 1;
  std::string digits;
  for (char c : z.substr(1)) {
    if (c >= '0' && c <= '9') digits.push_back(c);
    else if (c != ':') return std::nullopt;
  }
  if (digits.size() != 4) return std::nullopt;
  const long hh = std::stol(digits.substr(0, 2));
  const long mm = std::stol(digits.substr(2, 2));
  return sign * (hh * 3600 + mm * 60);
}

}  // namespace detail

// RFC 3339 / ISO 8601 as used by Atom: 2024-03-01T10:00:00Z,
// 2024-03-01T10:00:00.250+02:00, or a bare date.
inline std::optional<Timestamp> parse_iso8601(std::string_view text) {
  std::tm tm{};
  std::istringstream in{std::string(text)};
  in.imbue(std::locale::classic());
  in >> std::get_time(&tm, "%Y-%m-%d");
  if (in.fail()) return std::nullopt;
  if (in.peek() == std::char_traits<char>::eof()) return detail::from_tm(tm, 0, 0);
  const char sep = static_cast<char>(in.get());
  if (sep != 'T' && sep != 't' && sep != ' ') return std::nullopt;
  in >> std::get_time(&tm, "%H:%M:%S");
  if (in.fail()) return std::nullopt;
  int millis = 0;
  if (in.peek() == '.') {
    in.get();
    int digits = 0;
    while (std::isdigit(in.peek())) {
      const int d = in.get() - '0';
      if (digits < 3) millis = millis * 10 + d;
      ++digits;
    }
    for (; digits < 3; ++digits) millis *= 10;
  }
  std::string rest;
  std::getline(in, rest);
  const auto offset = detail::parse_zone(rest);
  if (!offset) return std::nullopt;
  return detail::from_tm(tm, *offset, millis);
}

// RFC 822 / 1123 dates as used by RSS pubDate:
// "Tue, 05 Mar 2024 14:30:00 GMT", day name optional.
inline std::optional<Timestamp> parse_rfc822(std::string_view text) {
  std::string s(text);
  if (const auto comma = s.find(','); comma != std::string::npos) s = s.substr(comma + 1);
  std::tm tm{};
  std::istringstream in{s};
  in.imbue(std::locale::classic());
  in >> std::get_time(&tm, "%d %b %Y %H:%M");
  if (in.fail()) return std::nullopt;
  if (in.peek() == ':') {
    in.get();
    int sec = 0;
    in >> sec;
    if (in.fail()) return std::nullopt;
    tm.tm_sec = sec;
  }
  std::string rest;
  std::getline(in, rest);
  const auto offset = detail::parse_zone(rest);
  if (!offset) return std::nullopt;
  return detail::from_tm(tm, *offset, 0);
}

// Accepts either family of formats.
inline std::optional<Timestamp> parse_timestamp(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  if (auto t = parse_iso8601(text)) return t;
  return parse_rfc822(text);
}

}  // namespace newsdesk
