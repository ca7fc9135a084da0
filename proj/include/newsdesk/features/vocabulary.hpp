#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "newsdesk/error.hpp"

namespace newsdesk::features {

// Column schema for tf-idf features. Terms are sorted so column order is a
// function of the corpus alone.
struct Vocabulary {
  std::vector<std::string> terms;
  std::vector<std::size_t> document_frequency;  // aligned with terms
  std::size_t corpus_size = 0;

  std::size_t size() const noexcept { return terms.size(); }

  // Column index of a term, or npos.
  std::size_t index_of(const std::string& term) const {
    auto it = std::lower_bound(terms.begin(), terms.end(), term);
    if (it == terms.end() || *it != term) return npos;
    return static_cast<std::size_t>(it - terms.begin());
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;
};

// `documents` are token lists. Keeps terms with df >= min_df; when more than
// max_terms survive, keeps the highest-df ones (ties: lexicographically
// smaller first). max_terms == 0 means unlimited.
inline Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& documents,
                                   std::size_t min_df, std::size_t max_terms) {
  if (documents.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot build a vocabulary from no documents");
  if (min_df < 1) min_df = 1;
  std::map<std::string, std::size_t> df;
  for (const auto& doc : documents) {
    const std::set<std::string> unique(doc.begin(), doc.end());
    for (const auto& t : unique) ++df[t];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [term, count] : df)
    if (count >= min_df) kept.emplace_back(term, count);
  if (max_terms > 0 && kept.size() > max_terms) {
    std::stable_sort(kept.begin(), kept.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    kept.resize(max_terms);
    std::sort(kept.begin(), kept.end());
  }
  Vocabulary vocab;
  vocab.corpus_size = documents.size();
  for (auto& [term, count] : kept) {
    vocab.terms.push_back(term);
    vocab.document_frequency.push_back(count);
  }
  return vocab;
}

inline nlohmann::json to_json(const Vocabulary& v) {
  return {{"terms", v.terms}, {"document_frequency", v.document_frequency}, {"corpus_size", v.corpus_size}};
}

inline Vocabulary vocabulary_from_json(const nlohmann::json& j) {
  Vocabulary v;
  v.terms = j.at("terms").get<std::vector<std::string>>();
  v.document_frequency = j.at("document_frequency").get<std::vector<std::size_t>>();
  v.corpus_size = j.at("corpus_size").get<std::size_t>();
  if (v.terms.size() != v.document_frequency.size())
    throw Error(ErrorCode::SchemaMismatch, "vocabulary terms and frequencies differ in length");
  if (!std::is_sorted(v.terms.begin(), v.terms.end()))
    throw Error(ErrorCode::SchemaMismatch, "vocabulary terms are not sorted");
  return v;
}

}  // namespace newsdesk::features
