#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "newsdesk/classifier/softmax_regression.hpp"

namespace newsdesk::classifier {

struct EvalReport {
  std::vector<std::string> classes;
  double accuracy = 0.0;
  std::map<std::string, double> precision;
  std::map<std::string, double> recall;
  // Classes whose precision (or recall) denominator was zero; reported as 0.
  std::vector<std::string> precision_undefined;
  std::vector<std::string> recall_undefined;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  std::size_t n = 0;
};

// Metrics from a confusion matrix indexed [true][predicted].
inline EvalReport report_from_confusion(std::vector<std::string> classes,
                                        std::vector<std::vector<std::size_t>> confusion) {
  EvalReport r;
  const std::size_t c = classes.size();
  std::size_t trace = 0;
  for (std::size_t t = 0; t < c; ++t)
    for (std::size_t p = 0; p < c; ++p) {
      r.n += confusion[t][p];
      if (t == p) trace += confusion[t][p];
    }
  r.accuracy = r.n == 0 ? 0.0 : static_cast<double>(trace) / static_cast<double>(r.n);
  for (std::size_t k = 0; k < c; ++k) {
    std::size_t predicted = 0, actual = 0;
    for (std::size_t o = 0; o < c; ++o) {
      predicted += confusion[o][k];
      actual += confusion[k][o];
    }
    const double tp = static_cast<double>(confusion[k][k]);
    if (predicted == 0) r.precision_undefined.push_back(classes[k]);
    if (actual == 0) r.recall_undefined.push_back(classes[k]);
    r.precision[classes[k]] = predicted == 0 ? 0.0 : tp / static_cast<double>(predicted);
    r.recall[classes[k]] = actual == 0 ? 0.0 : tp / static_cast<double>(actual);
  }
  r.classes = std::move(classes);
  r.confusion = std::move(confusion);
  return r;
}

inline EvalReport evaluate(const ClassifierModel& model, const FeatureMatrix& x, const LabelVector& y_true) {
  if (y_true.size() != x.n()) throw Error(ErrorCode::LengthMismatch, "label vector length differs from matrix rows");
  const auto truth = detail::label_indices(model, y_true);
  const auto predicted = predict_indices(model, x);
  const std::size_t c = model.num_classes();
  std::vector<std::vector<std::size_t>> confusion(c, std::vector<std::size_t>(c, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) ++confusion[truth[i]][predicted[i]];
  return report_from_confusion(model.classes, std::move(confusion));
}

inline nlohmann::json to_json(const EvalReport& r) {
  return {{"classes", r.classes},
          {"accuracy", r.accuracy},
          {"precision", r.precision},
          {"recall", r.recall},
          {"precision_undefined", r.precision_undefined},
          {"recall_undefined", r.recall_undefined},
          {"confusion", r.confusion},
          {"n", r.n}};
}

}  // namespace newsdesk::classifier
