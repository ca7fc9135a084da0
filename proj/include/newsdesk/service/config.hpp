#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "newsdesk/classifier/softmax_regression.hpp"
#include "newsdesk/error.hpp"
#include "newsdesk/features/lexicon.hpp"
#include "newsdesk/features/matrix.hpp"
#include "newsdesk/translator/backend.hpp"

namespace newsdesk::service {

// Default class set: the editorial topics plus a catch-all.
inline std::vector<std::string> default_classes() {
  auto classes = features::default_topics();
  classes.push_back("other");
  return classes;
}

struct Config {
  std::filesystem::path sources_path;
  std::filesystem::path lexicons_path;
  std::filesystem::path glossary_path;
  std::filesystem::path store_dir;
  std::filesystem::path fixture_labels_path;  // optional; url -> class
  std::filesystem::path static_dir;           // optional; dashboard bundle served under "/"
  std::vector<translator::TranslationBackendSpec> backends;
  features::FeatureMode feature_mode = features::FeatureMode::TopicRelevance;
  classifier::Hyperparameters classifier_hyper;
  std::vector<std::string> classes = default_classes();
  std::size_t vocabulary_min_df = 2;
  std::size_t vocabulary_max_terms = 5000;
  double holdout_fraction = 0.2;
  std::size_t fetch_parallelism = 4;
  std::size_t translation_concurrency = 2;
  // URL prefix -> local directory, for offline mirrors of feed hosts.
  std::map<std::string, std::filesystem::path> url_mirrors;
};

namespace detail {

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

inline const std::set<std::string>& config_keys() {
  static const std::set<std::string> keys{
      "sources_path",      "lexicons_path",        "glossary_path",    "store_dir",
      "backends",          "feature_mode",         "classifier_hyper", "classes",
      "fixture_labels_path", "static_dir",         "vocabulary",       "holdout_fraction",
      "fetch_parallelism", "translation_concurrency", "url_mirrors"};
  return keys;
}

}  // namespace detail

inline classifier::Hyperparameters hyper_from_json(const nlohmann::json& j) {
  classifier::Hyperparameters h;
  h.learning_rate = j.value("learning_rate", h.learning_rate);
  h.epochs = j.value("epochs", h.epochs);
  h.l2_lambda = j.value("l2_lambda", h.l2_lambda);
  h.seed = j.value("seed", h.seed);
  h.tolerance = j.value("tolerance", h.tolerance);
  return h;
}

// Relative paths resolve against `base_dir` (normally the config file's
// directory). Unknown keys are rejected.
inline Config config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!detail::config_keys().contains(key)) throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
  try {
    Config c;
    c.sources_path = detail::resolve(base_dir, j.at("sources_path").get<std::string>());
    c.lexicons_path = detail::resolve(base_dir, j.at("lexicons_path").get<std::string>());
    c.glossary_path = detail::resolve(base_dir, j.at("glossary_path").get<std::string>());
    c.store_dir = detail::resolve(base_dir, j.at("store_dir").get<std::string>());
    c.fixture_labels_path = detail::resolve(base_dir, j.value("fixture_labels_path", ""));
    c.static_dir = detail::resolve(base_dir, j.value("static_dir", ""));
    if (j.contains("backends"))
      for (const auto& b : j["backends"]) c.backends.push_back(translator::backend_spec_from_json(b));
    std::set<std::string> ids;
    for (const auto& b : c.backends)
      if (!ids.insert(b.id).second) throw Error(ErrorCode::InvalidConfig, "duplicate backend id '" + b.id + "'");
    c.feature_mode = features::parse_feature_mode(j.value("feature_mode", "topic_relevance"));
    if (j.contains("classifier_hyper")) c.classifier_hyper = hyper_from_json(j["classifier_hyper"]);
    if (j.contains("classes")) c.classes = j["classes"].get<std::vector<std::string>>();
    if (c.classes.size() < 2) throw Error(ErrorCode::InvalidConfig, "at least two classes are required");
    if (j.contains("vocabulary")) {
      c.vocabulary_min_df = j["vocabulary"].value("min_df", c.vocabulary_min_df);
      c.vocabulary_max_terms = j["vocabulary"].value("max_terms", c.vocabulary_max_terms);
    }
    c.holdout_fraction = j.value("holdout_fraction", c.holdout_fraction);
    if (c.holdout_fraction < 0.0 || c.holdout_fraction >= 1.0)
      throw Error(ErrorCode::InvalidConfig, "holdout_fraction must be in [0, 1)");
    c.fetch_parallelism = std::max<std::size_t>(1, j.value("fetch_parallelism", c.fetch_parallelism));
    c.translation_concurrency = std::max<std::size_t>(1, j.value("translation_concurrency", c.translation_concurrency));
    if (j.contains("url_mirrors"))
      for (const auto& [prefix, dir] : j["url_mirrors"].items())
        c.url_mirrors[prefix] = detail::resolve(base_dir, dir.get<std::string>());
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
}

inline Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  return config_from_json(j, std::filesystem::absolute(path).parent_path());
}

}  // namespace newsdesk::service
