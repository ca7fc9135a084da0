#pragma once

// Shared helpers and reference implementations for the test binaries. The
// reference implementations deliberately avoid the library's numerics.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "newsdesk/newsdesk.hpp"

namespace testing_support {

namespace fs = std::filesystem;

inline fs::path fixtures_dir() { return NEWSDESK_FIXTURES_DIR; }
inline fs::path data_dir() { return NEWSDESK_TEST_DATA_DIR; }

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& p, std::string_view content) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "newsdesk-test-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

// Fixture config with its store and a private copy of the source registry
// under `dir`.
inline newsdesk::service::Config fixture_config(const fs::path& dir) {
  auto config = newsdesk::service::load_config(fixtures_dir() / "newsdesk.json");
  fs::create_directories(dir);
  fs::copy_file(config.sources_path, dir / "sources.json", fs::copy_options::overwrite_existing);
  config.sources_path = dir / "sources.json";
  config.store_dir = dir / "store";
  return config;
}

// In-memory fetcher. Unknown urls are transport failures.
class MapFetcher final : public newsdesk::ingest::Fetcher {
 public:
  std::map<std::string, newsdesk::ingest::FetchResponse> pages;

  newsdesk::ingest::FetchResponse get(const std::string& url) override {
    {
      std::lock_guard lock(mu_);
      requested_.push_back(url);
    }
    auto it = pages.find(url);
    if (it == pages.end()) throw newsdesk::Error(newsdesk::ErrorCode::UnreachableSource, "no route to " + url);
    return it->second;
  }

  std::vector<std::string> requested() const {
    std::lock_guard lock(mu_);
    return requested_;
  }

 private:
  mutable std::mutex mu_;
  std::vector<std::string> requested_;
};

// ---- reference implementations ----

// TF-IDF straight from the definition with nested loops.
inline std::vector<std::vector<double>> brute_tfidf(const std::vector<std::vector<std::string>>& docs,
                                                    const std::vector<std::string>& terms) {
  const double n = static_cast<double>(docs.size());
  std::vector<std::vector<double>> out(docs.size(), std::vector<double>(terms.size(), 0.0));
  for (std::size_t j = 0; j < terms.size(); ++j) {
    double df = 0;
    for (const auto& d : docs) {
      bool found = false;
      for (const auto& t : d) found = found || t == terms[j];
      if (found) df += 1;
    }
    const double idf = std::log((1.0 + n) / (1.0 + df)) + 1.0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      double tf = 0;
      for (const auto& t : docs[i])
        if (t == terms[j]) tf += 1;
      out[i][j] = tf * idf;
    }
  }
  for (auto& row : out) {
    double sq = 0;
    for (double v : row) sq += v * v;
    if (sq > 0)
      for (double& v : row) v /= std::sqrt(sq);
  }
  return out;
}

// Softmax-regression objective computed naively (no log-sum-exp shift).
inline double reference_loss(const std::vector<std::vector<double>>& w, const std::vector<double>& b,
                             const std::vector<std::vector<double>>& x, const std::vector<std::size_t>& y,
                             double l2) {
  double total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<double> z(w.size());
    double denom = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      z[k] = b[k];
      for (std::size_t j = 0; j < x[i].size(); ++j) z[k] += w[k][j] * x[i][j];
      denom += std::exp(z[k]);
    }
    total += -std::log(std::exp(z[y[i]]) / denom);
  }
  double sq = 0;
  for (const auto& row : w)
    for (double v : row) sq += v * v;
  return total / static_cast<double>(x.size()) + 0.5 * l2 * sq;
}

struct GradientCheck {
  double max_relative_error = 0;
};

// Relative error with a floor on the denominator so that components whose
// true value is ~0 are judged on absolute error.
inline double relative_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// Builds a random problem, evaluates the library's analytic gradient and
// compares it against central differences of reference_loss.
inline GradientCheck check_random_gradient(std::mt19937_64& rng, double h = 1e-5) {
  using namespace newsdesk;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t n = 1 + rng() % 5, m = 1 + rng() % 6, c = 2 + rng() % 3;
  const double l2 = (rng() % 2) ? 1e-2 : 0.0;

  std::vector<std::string> classes;
  std::vector<std::string> columns;
  for (std::size_t k = 0; k < c; ++k) classes.push_back("c" + std::to_string(k));
  for (std::size_t j = 0; j < m; ++j) columns.push_back("f" + std::to_string(j));

  std::vector<std::vector<double>> w(c, std::vector<double>(m)), xs(n, std::vector<double>(m));
  std::vector<double> b(c);
  std::vector<std::size_t> y(n);
  for (auto& row : w)
    for (double& v : row) v = u(rng);
  for (double& v : b) v = u(rng);
  for (auto& row : xs)
    for (double& v : row) v = u(rng) * 2.0;
  for (auto& v : y) v = rng() % c;

  features::FeatureMatrix x;
  x.mode = features::FeatureMode::Tfidf;
  x.columns = columns;
  x.values = features::Matrix(n, m);
  features::LabelVector labels;
  for (std::size_t i = 0; i < n; ++i) {
    x.rows.push_back("r" + std::to_string(i));
    for (std::size_t j = 0; j < m; ++j) x.values.row(i)[j] = xs[i][j];
    labels.labels.push_back(classes[y[i]]);
  }
  auto model = classifier::ClassifierModel::zeros(classes, classifier::schema_of(x));
  for (std::size_t k = 0; k < c; ++k) {
    for (std::size_t j = 0; j < m; ++j) model.weights.row(k)[j] = w[k][j];
    model.bias[k] = b[k];
  }
  const auto analytic = classifier::loss_and_gradient(model, x, labels, l2);

  GradientCheck out;
  for (std::size_t k = 0; k < c; ++k) {
    for (std::size_t j = 0; j < m; ++j) {
      auto wp = w, wm = w;
      wp[k][j] += h;
      wm[k][j] -= h;
      const double numeric = (reference_loss(wp, b, xs, y, l2) - reference_loss(wm, b, xs, y, l2)) / (2 * h);
      out.max_relative_error =
          std::max(out.max_relative_error, relative_error(analytic.grad_weights.row(k)[j], numeric));
    }
    auto bp = b, bm = b;
    bp[k] += h;
    bm[k] -= h;
    const double numeric = (reference_loss(w, bp, xs, y, l2) - reference_loss(w, bm, xs, y, l2)) / (2 * h);
    out.max_relative_error = std::max(out.max_relative_error, relative_error(analytic.grad_bias[k], numeric));
  }
  return out;
}

// Nearest-centroid classifier over raw term-count vectors (cosine
// similarity). Used to confirm the fixture problem is easy independently
// of the trained model.
inline double nearest_centroid_accuracy(const std::vector<std::vector<std::string>>& train_docs,
                                        const std::vector<std::string>& train_labels,
                                        const std::vector<std::vector<std::string>>& test_docs,
                                        const std::vector<std::string>& test_labels) {
  std::map<std::string, std::map<std::string, double>> centroid;
  std::map<std::string, double> count;
  for (std::size_t i = 0; i < train_docs.size(); ++i) {
    std::map<std::string, double> tf;
    for (const auto& t : train_docs[i]) tf[t] += 1;
    double norm = 0;
    for (const auto& [_, v] : tf) norm += v * v;
    for (const auto& [t, v] : tf) centroid[train_labels[i]][t] += v / std::sqrt(norm);
    count[train_labels[i]] += 1;
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test_docs.size(); ++i) {
    std::map<std::string, double> tf;
    for (const auto& t : test_docs[i]) tf[t] += 1;
    std::string best;
    double best_score = -1;
    for (const auto& [label, c] : centroid) {
      double dot = 0, cn = 0, dn = 0;
      for (const auto& [t, v] : c) cn += (v / count[label]) * (v / count[label]);
      for (const auto& [t, v] : tf) {
        dn += v * v;
        if (auto it = c.find(t); it != c.end()) dot += v * it->second / count[label];
      }
      const double score = dot / (std::sqrt(cn) * std::sqrt(dn));
      if (score > best_score) {
        best_score = score;
        best = label;
      }
    }
    if (best == test_labels[i]) ++correct;
  }
  return test_docs.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(test_docs.size());
}

// Random English-like text made of sentences separated by one space.
inline std::vector<std::string> random_sentences(std::mt19937_64& rng, std::size_t count, std::size_t max_words) {
  static const std::vector<std::string> words{"rent", "Queens", "jobs", "clinic", "council", "visa", "208,000",
                                              "school", "a", "the", "Bangladeshi", "families", "e.g", "3.5"};
  static const std::vector<std::string> ends{".", "!", "?", "।"};
  std::vector<std::string> out;
  for (std::size_t s = 0; s < count; ++s) {
    std::string sentence;
    const std::size_t n = 1 + rng() % max_words;
    for (std::size_t w = 0; w < n; ++w) {
      if (w) sentence += ' ';
      sentence += words[rng() % words.size()];
    }
    sentence += ends[rng() % ends.size()];
    out.push_back(sentence);
  }
  return out;
}

inline std::string collapse_ws(std::string_view s) { return newsdesk::unicode::collapse_whitespace(s); }

}  // namespace testing_support
