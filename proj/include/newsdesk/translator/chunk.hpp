#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "newsdesk/unicode.hpp"

namespace newsdesk::translator {

struct Chunk {
  std::string text;
  bool oversized = false;  // a single sentence longer than the limit
  friend bool operator==(const Chunk&, const Chunk&) = default;
};

inline constexpr std::size_t kMinChunkChars = 200;

inline bool is_sentence_terminator(unicode::CodePoint cp) {
  return cp == U'.' || cp == U'!' || cp == U'?' || cp == U'।';  // danda
}

// Code-point spans [begin, end) of each sentence. A sentence ends at a
// terminator that is followed by whitespace; the whitespace between
// sentences belongs to neither.
inline std::vector<std::pair<std::size_t, std::size_t>> sentence_spans(const std::vector<unicode::CodePoint>& cps) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  std::size_t i = 0;
  const std::size_t n = cps.size();
  while (i < n && unicode::is_whitespace(cps[i])) ++i;
  std::size_t start = i;
  for (; i < n; ++i) {
    if (is_sentence_terminator(cps[i]) && i + 1 < n && unicode::is_whitespace(cps[i + 1])) {
      spans.emplace_back(start, i + 1);
      std::size_t j = i + 1;
      while (j < n && unicode::is_whitespace(cps[j])) ++j;
      start = j;
      i = j - 1;
    }
  }
  if (start < n) {
    std::size_t end = n;
    while (end > start && unicode::is_whitespace(cps[end - 1])) --end;
    if (end > start) spans.emplace_back(start, end);
  }
  return spans;
}

// Greedy sentence packing: each chunk is the longest run of consecutive
// sentences (with their original separating whitespace) that fits in
// max_chunk_chars code points. A sentence that alone exceeds the limit
// becomes its own chunk, flagged oversized.
inline std::vector<Chunk> chunk_text(std::string_view text, std::size_t max_chunk_chars) {
  std::vector<Chunk> chunks;
  const auto cps = unicode::decode(text);
  const auto spans = sentence_spans(cps);
  auto slice = [&](std::size_t b, std::size_t e) {
    return unicode::encode(std::vector<unicode::CodePoint>(cps.begin() + static_cast<std::ptrdiff_t>(b),
                                                            cps.begin() + static_cast<std::ptrdiff_t>(e)));
  };
  std::size_t s = 0;
  while (s < spans.size()) {
    const std::size_t begin = spans[s].first;
    std::size_t last = s;
    if (spans[s].second - begin > max_chunk_chars) {
      chunks.push_back({slice(begin, spans[s].second), true});
      ++s;
      continue;
    }
    while (last + 1 < spans.size() && spans[last + 1].second - begin <= max_chunk_chars) ++last;
    chunks.push_back({slice(begin, spans[last].second), false});
    s = last + 1;
  }
  return chunks;
}

}  // namespace newsdesk::translator
