#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "newsdesk/error.hpp"
#include "newsdesk/features/matrix.hpp"
#include "newsdesk/features/vocabulary.hpp"

namespace newsdesk::classifier {

using features::FeatureMatrix;
using features::LabelVector;
using features::Matrix;

// Column layout a model was trained on. Tf-idf schemas carry the vocabulary
// so new articles can be featurized the same way.
struct FeatureSchema {
  features::FeatureMode mode = features::FeatureMode::TopicRelevance;
  std::vector<std::string> columns;
  std::optional<features::Vocabulary> vocabulary;

  std::string digest() const { return features::schema_digest(mode, columns); }
  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

inline FeatureSchema schema_of(const FeatureMatrix& x) { return {x.mode, x.columns, std::nullopt}; }

struct Hyperparameters {
  double learning_rate = 0.5;
  int epochs = 500;
  double l2_lambda = 1e-4;
  std::uint64_t seed = 0;  // unused by full-batch descent; kept in the model metadata
  double tolerance = 1e-9;
};

enum class StopReason { MaxEpochs, Tolerance, LossIncrease };

constexpr std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::MaxEpochs: return "max_epochs";
    case StopReason::Tolerance: return "tolerance";
    case StopReason::LossIncrease: return "loss_increase";
  }
  return "max_epochs";
}

struct TrainingMeta {
  std::uint64_t seed = 0;
  int epochs_run = 0;
  double final_loss = 0.0;
  double learning_rate = 0.0;
  double l2_lambda = 0.0;
  double tolerance = 0.0;
  StopReason stop_reason = StopReason::MaxEpochs;
  friend bool operator==(const TrainingMeta&, const TrainingMeta&) = default;
};

// Multinomial logistic regression: p(class | x) = softmax(W x + b).
struct ClassifierModel {
  std::vector<std::string> classes;
  FeatureSchema schema;
  Matrix weights;             // C x M
  std::vector<double> bias;   // C
  TrainingMeta meta;

  std::size_t num_classes() const noexcept { return classes.size(); }
  std::size_t num_features() const noexcept { return schema.columns.size(); }

  // Zero model over the given classes and schema.
  static ClassifierModel zeros(std::vector<std::string> classes, FeatureSchema schema) {
    ClassifierModel m;
    m.weights = Matrix(classes.size(), schema.columns.size());
    m.bias.assign(classes.size(), 0.0);
    m.classes = std::move(classes);
    m.schema = std::move(schema);
    return m;
  }

  friend bool operator==(const ClassifierModel&, const ClassifierModel&) = default;
};

// Numerically stable softmax (max subtracted before exponentiation).
inline std::vector<double> softmax(std::span<const double> logits) {
  for (double z : logits)
    if (!std::isfinite(z)) throw Error(ErrorCode::NonFiniteInput, "softmax input is not finite");
  std::vector<double> p(logits.begin(), logits.end());
  if (p.empty()) return p;
  const double mx = *std::max_element(p.begin(), p.end());
  double sum = 0.0;
  for (double& v : p) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

namespace detail {

inline void check_schema(const ClassifierModel& model, const FeatureMatrix& x) {
  if (x.mode != model.schema.mode || x.columns != model.schema.columns)
    throw Error(ErrorCode::SchemaMismatch, "feature schema " + x.digest() + " does not match model schema " +
                                               model.schema.digest());
  if (model.weights.rows() != model.classes.size() || model.weights.cols() != x.m() ||
      model.bias.size() != model.classes.size())
    throw Error(ErrorCode::SchemaMismatch, "model dimensions do not match the feature schema");
}

inline std::vector<std::size_t> label_indices(const ClassifierModel& model, const LabelVector& y) {
  std::map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < model.classes.size(); ++k) index[model.classes[k]] = k;
  std::vector<std::size_t> out;
  out.reserve(y.size());
  for (const auto& label : y.labels) {
    auto it = index.find(label);
    if (it == index.end()) throw Error(ErrorCode::UnknownClass, "label '" + label + "' is not a model class");
    out.push_back(it->second);
  }
  return out;
}

inline void logits_into(const ClassifierModel& model, std::span<const double> x, std::vector<double>& z) {
  z.assign(model.bias.begin(), model.bias.end());
  for (std::size_t k = 0; k < z.size(); ++k) {
    const auto w = model.weights.row(k);
    double acc = z[k];
    for (std::size_t j = 0; j < x.size(); ++j) acc += w[j] * x[j];
    z[k] = acc;
  }
}

}  // namespace detail

struct LossGradient {
  double loss = 0.0;
  Matrix grad_weights;             // C x M
  std::vector<double> grad_bias;   // C
};

// Mean cross-entropy over rows plus (l2_lambda / 2) * ||W||^2 (bias not
// penalized), with its exact gradient.
inline LossGradient loss_and_gradient(const ClassifierModel& model, const FeatureMatrix& x, const LabelVector& y,
                                      double l2_lambda) {
  detail::check_schema(model, x);
  if (y.size() != x.n())
    throw Error(ErrorCode::LengthMismatch, "label vector has " + std::to_string(y.size()) + " entries for " +
                                               std::to_string(x.n()) + " rows");
  const auto targets = detail::label_indices(model, y);
  const std::size_t c = model.num_classes();
  const std::size_t m = x.m();
  const std::size_t n = x.n();

  LossGradient out;
  out.grad_weights = Matrix(c, m);
  out.grad_bias.assign(c, 0.0);
  if (n == 0) return out;

  std::vector<double> z;
  double data_loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = x.values.row(i);
    detail::logits_into(model, xi, z);
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - mx);
    const double log_norm = mx + std::log(sum);
    data_loss += log_norm - z[targets[i]];
    for (std::size_t k = 0; k < c; ++k) {
      const double residual = std::exp(z[k] - log_norm) - (k == targets[i] ? 1.0 : 0.0);
      out.grad_bias[k] += residual;
      auto g = out.grad_weights.row(k);
      for (std::size_t j = 0; j < m; ++j) g[j] += residual * xi[j];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  double sq = 0.0;
  for (double w : model.weights.data()) sq += w * w;
  out.loss = data_loss * inv_n + 0.5 * l2_lambda * sq;
  for (std::size_t k = 0; k < c; ++k) {
    out.grad_bias[k] *= inv_n;
    auto g = out.grad_weights.row(k);
    const auto w = model.weights.row(k);
    for (std::size_t j = 0; j < m; ++j) g[j] = g[j] * inv_n + l2_lambda * w[j];
  }
  return out;
}

inline LossGradient loss_and_gradient(const ClassifierModel& model, const FeatureMatrix& x, const LabelVector& y) {
  return loss_and_gradient(model, x, y, model.meta.l2_lambda);
}

struct TrainOptions {
  // Preferred class order; classes absent from Y are dropped. Empty means
  // lexicographic order of the labels present.
  std::vector<std::string> class_order;
  // Called once with the initial loss (epoch 0) and after every accepted step.
  std::function<void(int epoch, double loss)> on_epoch;
};

// Full-batch gradient descent from all-zero parameters. Stops after
// `epochs` steps, when a step improves the loss by less than `tolerance`, or
// when a step would raise the loss (that step is discarded).
inline ClassifierModel train(const FeatureMatrix& x, const LabelVector& y, const Hyperparameters& hyper,
                             const TrainOptions& options = {}) {
  if (y.size() != x.n())
    throw Error(ErrorCode::LengthMismatch, "label vector length differs from matrix rows");
  std::vector<std::string> present(y.labels.begin(), y.labels.end());
  std::sort(present.begin(), present.end());
  present.erase(std::unique(present.begin(), present.end()), present.end());
  std::vector<std::string> classes;
  if (options.class_order.empty()) {
    classes = present;
  } else {
    for (const auto& label : present)
      if (std::find(options.class_order.begin(), options.class_order.end(), label) == options.class_order.end())
        throw Error(ErrorCode::UnknownClass, "label '" + label + "' is not in the configured class set");
    for (const auto& cls : options.class_order)
      if (std::binary_search(present.begin(), present.end(), cls)) classes.push_back(cls);
  }
  if (classes.size() < 2)
    throw Error(ErrorCode::DegenerateLabels, "training needs at least two distinct classes, got " +
                                                 std::to_string(classes.size()));
  if (!(hyper.learning_rate > 0.0) || hyper.epochs < 0 || hyper.l2_lambda < 0.0)
    throw Error(ErrorCode::InvalidConfig, "learning_rate must be > 0, epochs >= 0, l2_lambda >= 0");

  // Canonical row order (label, then feature values) so the floating-point
  // sums do not depend on how the caller ordered the rows.
  std::vector<std::size_t> order(x.n());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (y.labels[a] != y.labels[b]) return y.labels[a] < y.labels[b];
    const auto ra = x.values.row(a), rb = x.values.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  FeatureMatrix xs;
  xs.mode = x.mode;
  xs.columns = x.columns;
  xs.values = Matrix(x.n(), x.m());
  LabelVector ys;
  for (std::size_t i = 0; i < order.size(); ++i) {
    xs.rows.push_back(x.rows[order[i]]);
    const auto src = x.values.row(order[i]);
    std::copy(src.begin(), src.end(), xs.values.row(i).begin());
    ys.labels.push_back(y.labels[order[i]]);
  }

  auto model = ClassifierModel::zeros(std::move(classes), schema_of(x));
  model.meta = {hyper.seed, 0, 0.0, hyper.learning_rate, hyper.l2_lambda, hyper.tolerance, StopReason::MaxEpochs};

  auto current = loss_and_gradient(model, xs, ys, hyper.l2_lambda);
  if (!std::isfinite(current.loss)) throw Error(ErrorCode::NonFiniteLoss, "initial loss is not finite");
  if (options.on_epoch) options.on_epoch(0, current.loss);

  for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
    ClassifierModel next = model;
    auto& w = next.weights.data();
    const auto& gw = current.grad_weights.data();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= hyper.learning_rate * gw[i];
    for (std::size_t k = 0; k < next.bias.size(); ++k) next.bias[k] -= hyper.learning_rate * current.grad_bias[k];

    auto candidate = loss_and_gradient(next, xs, ys, hyper.l2_lambda);
    if (!std::isfinite(candidate.loss))
      throw Error(ErrorCode::NonFiniteLoss, "loss diverged at epoch " + std::to_string(epoch) +
                                                "; lower the learning rate");
    if (candidate.loss > current.loss) {
      model.meta.stop_reason = StopReason::LossIncrease;
      break;
    }
    const double improvement = current.loss - candidate.loss;
    model.weights = std::move(next.weights);
    model.bias = std::move(next.bias);
    current = std::move(candidate);
    model.meta.epochs_run = epoch;
    if (options.on_epoch) options.on_epoch(epoch, current.loss);
    if (improvement < hyper.tolerance) {
      model.meta.stop_reason = StopReason::Tolerance;
      break;
    }
  }
  model.meta.final_loss = current.loss;
  return model;
}

// Index of the largest logit per row; ties go to the lowest class index.
inline std::vector<std::size_t> predict_indices(const ClassifierModel& model, const FeatureMatrix& x) {
  detail::check_schema(model, x);
  std::vector<std::size_t> out;
  out.reserve(x.n());
  std::vector<double> z;
  for (std::size_t i = 0; i < x.n(); ++i) {
    detail::logits_into(model, x.values.row(i), z);
    std::size_t best = 0;
    for (std::size_t k = 1; k < z.size(); ++k)
      if (z[k] > z[best]) best = k;
    out.push_back(best);
  }
  return out;
}

inline LabelVector predict(const ClassifierModel& model, const FeatureMatrix& x) {
  LabelVector y;
  for (auto k : predict_indices(model, x)) y.labels.push_back(model.classes[k]);
  return y;
}

// Class probabilities for one feature row.
inline std::vector<double> predict_proba(const ClassifierModel& model, std::span<const double> row) {
  std::vector<double> z;
  detail::logits_into(model, row, z);
  return softmax(z);
}

}  // namespace newsdesk::classifier
