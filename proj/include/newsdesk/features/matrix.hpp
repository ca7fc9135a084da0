#pragma once

#include <cassert>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "newsdesk/error.hpp"
#include "newsdesk/hash.hpp"

namespace newsdesk::features {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class FeatureMode { TopicRelevance, Tfidf };

constexpr std::string_view to_string(FeatureMode m) {
  return m == FeatureMode::TopicRelevance ? "topic_relevance" : "tfidf";
}

inline FeatureMode parse_feature_mode(std::string_view s) {
  if (s == "topic_relevance") return FeatureMode::TopicRelevance;
  if (s == "tfidf") return FeatureMode::Tfidf;
  throw Error(ErrorCode::InvalidConfig, "unknown feature mode '" + std::string(s) + "'");
}

// Hash identifying a column layout; models record it and refuse input built
// on any other layout.
inline std::string schema_digest(FeatureMode mode, std::span<const std::string> columns) {
  std::uint64_t h = fnv1a64(to_string(mode));
  for (const auto& c : columns) {
    h = fnv1a64("\n", h);
    h = fnv1a64(c, h);
  }
  return to_hex(h);
}

// N articles by M columns; rows[i] names the article in row i.
struct FeatureMatrix {
  std::vector<std::string> rows;
  std::vector<std::string> columns;
  Matrix values;
  FeatureMode mode = FeatureMode::TopicRelevance;

  std::size_t n() const noexcept { return rows.size(); }
  std::size_t m() const noexcept { return columns.size(); }
  std::string digest() const { return schema_digest(mode, columns); }
};

// Class labels aligned with FeatureMatrix rows.
struct LabelVector {
  std::vector<std::string> labels;
  std::size_t size() const noexcept { return labels.size(); }
  friend bool operator==(const LabelVector&, const LabelVector&) = default;
};

namespace detail {
inline void write_csv_field(std::ostream& out, std::string_view field) {
  if (field.find_first_of(",\"\n") == std::string_view::npos) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}
}  // namespace detail

// Header row is "article_id" followed by the column schema.
inline void write_csv(std::ostream& out, const FeatureMatrix& x) {
  out << "article_id";
  for (const auto& c : x.columns) {
    out << ',';
    detail::write_csv_field(out, c);
  }
  out << '\n';
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < x.n(); ++i) {
    detail::write_csv_field(out, x.rows[i]);
    for (double v : x.values.row(i)) out << ',' << v;
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace newsdesk::features
