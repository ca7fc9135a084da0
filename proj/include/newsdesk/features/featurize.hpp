#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "newsdesk/error.hpp"
#include "newsdesk/features/lexicon.hpp"
#include "newsdesk/features/matrix.hpp"
#include "newsdesk/features/vocabulary.hpp"
#include "newsdesk/ingest/article.hpp"
#include "newsdesk/unicode.hpp"

namespace newsdesk::features {

// Anything that can become a matrix row.
struct Document {
  std::string id;
  std::vector<std::string> tokens;
};

inline Document to_document(const ingest::Article& a) {
  return {a.id, unicode::tokenize(ingest::searchable_text(a))};
}

inline std::vector<Document> to_documents(std::span<const ingest::Article> articles) {
  std::vector<Document> docs;
  docs.reserve(articles.size());
  for (const auto& a : articles) docs.push_back(to_document(a));
  return docs;
}

inline std::vector<std::vector<std::string>> token_lists(std::span<const Document> docs) {
  std::vector<std::vector<std::string>> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(d.tokens);
  return out;
}

// Smoothed inverse document frequency: ln((1+N)/(1+df)) + 1.
inline double smoothed_idf(std::size_t corpus_size, std::size_t df) {
  return std::log((1.0 + static_cast<double>(corpus_size)) / (1.0 + static_cast<double>(df))) + 1.0;
}

// x_ij = count(term j in doc i) * idf(j), then each nonzero row scaled to
// unit L2 norm. Tokens outside the vocabulary are ignored.
inline FeatureMatrix featurize_tfidf(std::span<const Document> docs, const Vocabulary& vocab) {
  if (vocab.size() == 0) throw Error(ErrorCode::SchemaMismatch, "vocabulary is empty");
  FeatureMatrix x;
  x.mode = FeatureMode::Tfidf;
  x.columns = vocab.terms;
  x.values = Matrix(docs.size(), vocab.size());
  std::vector<double> idf(vocab.size());
  for (std::size_t j = 0; j < vocab.size(); ++j) idf[j] = smoothed_idf(vocab.corpus_size, vocab.document_frequency[j]);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    x.rows.push_back(docs[i].id);
    auto row = x.values.row(i);
    for (const auto& t : docs[i].tokens) {
      const auto j = vocab.index_of(t);
      if (j != Vocabulary::npos) row[j] += 1.0;
    }
    double norm_sq = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      row[j] *= idf[j];
      norm_sq += row[j] * row[j];
    }
    if (norm_sq > 0.0) {
      const double norm = std::sqrt(norm_sq);
      for (double& v : row) v /= norm;
    }
  }
  return x;
}

inline FeatureMatrix featurize_tfidf(std::span<const ingest::Article> articles, const Vocabulary& vocab) {
  const auto docs = to_documents(articles);
  return featurize_tfidf(std::span<const Document>(docs), vocab);
}

// Relevance of each topic to one token list: summed lexicon weight of every
// matching token occurrence over the token count, clamped to [0, 1].
inline std::vector<double> topic_scores(std::span<const std::string> tokens,
                                        const std::vector<TopicLexicon>& lexicons) {
  std::vector<double> scores(lexicons.size(), 0.0);
  if (tokens.empty()) return scores;
  for (std::size_t j = 0; j < lexicons.size(); ++j) {
    double sum = 0.0;
    for (const auto& t : tokens) {
      if (auto it = lexicons[j].terms.find(t); it != lexicons[j].terms.end()) sum += it->second;
    }
    scores[j] = std::clamp(sum / static_cast<double>(tokens.size()), 0.0, 1.0);
  }
  return scores;
}

inline std::map<std::string, double> topic_score_map(const ingest::Article& a,
                                                     const std::vector<TopicLexicon>& lexicons) {
  const auto tokens = unicode::tokenize(ingest::searchable_text(a));
  const auto scores = topic_scores(tokens, lexicons);
  std::map<std::string, double> out;
  for (std::size_t j = 0; j < lexicons.size(); ++j) out[lexicons[j].topic] = scores[j];
  return out;
}

inline FeatureMatrix featurize_topics(std::span<const Document> docs, const std::vector<TopicLexicon>& lexicons) {
  if (lexicons.empty()) throw Error(ErrorCode::EmptyLexicons, "no topic lexicons configured");
  FeatureMatrix x;
  x.mode = FeatureMode::TopicRelevance;
  x.columns = topic_names(lexicons);
  x.values = Matrix(docs.size(), lexicons.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    x.rows.push_back(docs[i].id);
    const auto scores = topic_scores(docs[i].tokens, lexicons);
    std::copy(scores.begin(), scores.end(), x.values.row(i).begin());
  }
  return x;
}

inline FeatureMatrix featurize_topics(std::span<const ingest::Article> articles,
                                      const std::vector<TopicLexicon>& lexicons) {
  const auto docs = to_documents(articles);
  return featurize_topics(std::span<const Document>(docs), lexicons);
}

}  // namespace newsdesk::features
