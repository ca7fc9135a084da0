#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "newsdesk/classifier/softmax_regression.hpp"
#include "newsdesk/error.hpp"

namespace newsdesk::classifier {

inline StopReason parse_stop_reason(std::string_view s) {
  if (s == "tolerance") return StopReason::Tolerance;
  if (s == "loss_increase") return StopReason::LossIncrease;
  return StopReason::MaxEpochs;
}

// {classes, schema_digest, feature_schema, weights (row-major), bias,
// training_meta}. Contains nothing time-dependent, so identical training
// runs serialize to identical bytes.
inline nlohmann::json to_json(const ClassifierModel& m) {
  nlohmann::json schema{{"mode", features::to_string(m.schema.mode)}, {"columns", m.schema.columns}};
  if (m.schema.vocabulary) schema["vocabulary"] = features::to_json(*m.schema.vocabulary);
  return {{"classes", m.classes},
          {"schema_digest", m.schema.digest()},
          {"feature_schema", schema},
          {"weights", m.weights.data()},
          {"bias", m.bias},
          {"training_meta",
           {{"seed", m.meta.seed},
            {"epochs_run", m.meta.epochs_run},
            {"final_loss", m.meta.final_loss},
            {"learning_rate", m.meta.learning_rate},
            {"l2_lambda", m.meta.l2_lambda},
            {"tolerance", m.meta.tolerance},
            {"stop_reason", to_string(m.meta.stop_reason)}}}};
}

inline ClassifierModel model_from_json(const nlohmann::json& j) {
  try {
    ClassifierModel m;
    m.classes = j.at("classes").get<std::vector<std::string>>();
    const auto& schema = j.at("feature_schema");
    m.schema.mode = features::parse_feature_mode(schema.at("mode").get<std::string>());
    m.schema.columns = schema.at("columns").get<std::vector<std::string>>();
    if (schema.contains("vocabulary")) m.schema.vocabulary = features::vocabulary_from_json(schema["vocabulary"]);
    if (j.at("schema_digest").get<std::string>() != m.schema.digest())
      throw Error(ErrorCode::SchemaMismatch, "schema_digest does not match the stored column schema");
    const auto c = m.classes.size();
    const auto cols = m.schema.columns.size();
    auto flat = j.at("weights").get<std::vector<double>>();
    if (c < 2 || flat.size() != c * cols)
      throw Error(ErrorCode::SchemaMismatch, "weights do not have classes x columns entries");
    m.weights = features::Matrix(c, cols);
    m.weights.data() = std::move(flat);
    m.bias = j.at("bias").get<std::vector<double>>();
    if (m.bias.size() != c) throw Error(ErrorCode::SchemaMismatch, "bias length differs from class count");
    for (double v : m.weights.data())
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "non-finite weight in model file");
    for (double v : m.bias)
      if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "non-finite bias in model file");
    const auto& meta = j.at("training_meta");
    m.meta.seed = meta.at("seed").get<std::uint64_t>();
    m.meta.epochs_run = meta.at("epochs_run").get<int>();
    m.meta.final_loss = meta.at("final_loss").get<double>();
    m.meta.learning_rate = meta.at("learning_rate").get<double>();
    m.meta.l2_lambda = meta.at("l2_lambda").get<double>();
    m.meta.tolerance = meta.value("tolerance", 0.0);
    m.meta.stop_reason = parse_stop_reason(meta.value("stop_reason", "max_epochs"));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, std::string("model file: ") + e.what());
  }
}

inline std::string serialize(const ClassifierModel& m) { return to_json(m).dump(1) + "\n"; }

inline void save_model(const ClassifierModel& m, const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp);
    out << serialize(m);
  }
  std::filesystem::rename(tmp, path);
}

inline ClassifierModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NoModel, "no model at " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace newsdesk::classifier
