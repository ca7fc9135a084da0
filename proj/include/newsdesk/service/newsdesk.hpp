#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <set>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "newsdesk/classifier/evaluate.hpp"
#include "newsdesk/classifier/model_io.hpp"
#include "newsdesk/classifier/softmax_regression.hpp"
#include "newsdesk/error.hpp"
#include "newsdesk/features/featurize.hpp"
#include "newsdesk/features/lexicon.hpp"
#include "newsdesk/ingest/article.hpp"
#include "newsdesk/ingest/extract.hpp"
#include "newsdesk/ingest/feed.hpp"
#include "newsdesk/ingest/fetch.hpp"
#include "newsdesk/ingest/source.hpp"
#include "newsdesk/service/config.hpp"
#include "newsdesk/service/run.hpp"
#include "newsdesk/service/store.hpp"
#include "newsdesk/translator/backend.hpp"
#include "newsdesk/translator/glossary.hpp"
#include "newsdesk/translator/remote.hpp"
#include "newsdesk/translator/translate.hpp"

namespace newsdesk::service {

enum class ClassifyMode {
  Auto,     // classify when a model exists
  Require,  // fail with NoModel when none exists
  Skip,
};

enum class LabelSource { Fixture, Operator };

inline LabelSource parse_label_source(std::string_view s) {
  if (s == "fixture" || s == "fixture-labels") return LabelSource::Fixture;
  if (s == "operator" || s == "operator-labels") return LabelSource::Operator;
  throw Error(ErrorCode::InvalidConfig, "label source must be 'fixture' or 'operator'");
}

struct PipelineOptions {
  ClassifyMode classify = ClassifyMode::Auto;
  bool train = false;  // train on labeled articles after ingest, before classifying
  LabelSource label_source = LabelSource::Fixture;
};

struct TrainingOutcome {
  classifier::ClassifierModel model;
  std::size_t train_size = 0;
  std::vector<std::string> holdout_ids;
  std::optional<classifier::EvalReport> holdout_report;
  std::filesystem::path model_path;
};

// Backend registration: spec plus the implementation that serves it.
struct BackendEntry {
  translator::TranslationBackendSpec spec;
  std::shared_ptr<translator::TranslationBackend> backend;
};

// The news desk: source registry, article store, model and translation
// backends behind one object. CLI commands and API handlers call into this.
class NewsDesk {
 public:
  explicit NewsDesk(Config config, std::unique_ptr<ingest::Fetcher> fetcher = nullptr,
                    std::function<Timestamp()> clock = now_utc)
      : config_(std::move(config)),
        store_(config_.store_dir),
        registry_(ingest::SourceRegistry::load(config_.sources_path)),
        lexicons_(features::load_lexicons(config_.lexicons_path)),
        fetcher_(fetcher ? std::move(fetcher) : std::make_unique<ingest::UrlFetcher>(config_.url_mirrors)),
        clock_(std::move(clock)),
        translation_slots_(static_cast<std::ptrdiff_t>(std::min<std::size_t>(config_.translation_concurrency, 64))) {
    if (!config_.glossary_path.empty() && std::filesystem::exists(config_.glossary_path))
      glossary_ = translator::load_glossary(config_.glossary_path);
    for (const auto& spec : config_.backends) {
      if (spec.kind == translator::BackendKind::MockGlossary)
        register_backend(spec, std::make_shared<translator::MockGlossaryBackend>(glossary_));
      else
        register_backend(spec, std::make_shared<translator::RemoteLlmBackend>(spec));
    }
  }

  const Config& config() const noexcept { return config_; }
  ArticleStore& store() noexcept { return store_; }
  const ArticleStore& store() const noexcept { return store_; }
  const std::vector<features::TopicLexicon>& lexicons() const noexcept { return lexicons_; }
  const translator::Glossary& glossary() const noexcept { return glossary_; }

  void set_retry_policy(translator::RetryPolicy p) { retry_ = p; }

  // Adds or replaces a backend.
  void register_backend(translator::TranslationBackendSpec spec,
                        std::shared_ptr<translator::TranslationBackend> backend) {
    translator::validate(spec);
    std::lock_guard lock(backends_mu_);
    auto id = spec.id;
    backends_[id] = BackendEntry{std::move(spec), std::move(backend)};
  }

  std::vector<translator::TranslationBackendSpec> backends() const {
    std::lock_guard lock(backends_mu_);
    std::vector<translator::TranslationBackendSpec> out;
    for (const auto& spec : config_.backends)
      if (backends_.contains(spec.id)) out.push_back(backends_.at(spec.id).spec);
    for (const auto& [id, entry] : backends_)
      if (std::none_of(out.begin(), out.end(), [&](const auto& s) { return s.id == id; })) out.push_back(entry.spec);
    return out;
  }

  // --- sources ---

  ingest::SourceRegistry sources() const {
    std::lock_guard lock(registry_mu_);
    return registry_;
  }

  ingest::Source add_source(ingest::Source source) {
    std::lock_guard lock(registry_mu_);
    auto next = registry_;
    next.add(source);
    next.save(config_.sources_path);
    registry_ = std::move(next);
    return source;
  }

  ingest::Source patch_source(const std::string& id, const ingest::SourcePatch& patch) {
    std::lock_guard lock(registry_mu_);
    auto next = registry_;
    const auto updated = next.patch(id, patch);
    next.save(config_.sources_path);
    registry_ = std::move(next);
    return updated;
  }

  ingest::GateDecision gatekeep(const std::string& source_id) const {
    std::lock_guard lock(registry_mu_);
    return registry_.gatekeep(source_id);
  }

  // --- pipeline ---

  // Ingest from every source that passes the gate, featurize and store new
  // articles, optionally train, then label the new articles with the
  // model. Translation is left to translate_article.
  PipelineRun run_pipeline(const PipelineOptions& options = {}) {
    PipelineRun run;
    run.started_at = clock_();
    const auto registry = sources();

    std::vector<ingest::Source> eligible;
    for (const auto& s : registry.sources()) {
      const auto decision = ingest::gatekeep(s);
      if (ingest::allowed(decision)) {
        eligible.push_back(s);
      } else {
        ++run.sources_denied;
        run.errors.push_back({"gate", s.id, std::string(ingest::to_string(std::get<ingest::Deny>(decision).reason))});
      }
    }
    if (eligible.empty())
      throw Error(ErrorCode::NoEligibleSources, "no source is both enabled and permitted for republication");
    if (options.classify == ClassifyMode::Require && !options.train && !has_model())
      throw Error(ErrorCode::NoModel, "classification requested but no trained model exists");

    const auto fetched = fetch_all(eligible);
    run.sources_polled = eligible.size();

    std::set<std::uint64_t> seen_this_run;
    for (std::size_t s = 0; s < eligible.size(); ++s) {
      const auto& outcome = fetched[s];
      if (std::holds_alternative<Error>(outcome)) {
        const auto& e = std::get<Error>(outcome);
        run.errors.push_back({"fetch", eligible[s].id, std::string(to_string(e.code())) + ": " + e.detail()});
        continue;
      }
      const auto& result = std::get<ingest::FeedResult>(outcome);
      for (const auto& issue : result.issues) {
        std::string reason = std::string(to_string(issue.code)) + ": " + issue.reason;
        if (issue.byte_offset >= 0) reason += " (byte " + std::to_string(issue.byte_offset) + ")";
        run.errors.push_back({"feed", issue.subject.empty() ? issue.source_id : issue.subject, reason});
      }
      for (const auto& stub : result.stubs) {
        ++run.articles_fetched;
        // The registry may have changed while fetching.
        bool permitted = false;
        try {
          permitted = ingest::allowed(gatekeep(stub.source_id));
        } catch (const Error&) {
          permitted = false;
        }
        if (!permitted) {
          ++run.gate_denied;
          run.errors.push_back({"gate", stub.url, "source '" + stub.source_id + "' no longer passes the gate"});
          continue;
        }
        ingest::Extracted extracted;
        try {
          extracted = ingest::extract_text(stub.raw_payload, stub.content_type);
        } catch (const Error& e) {
          ++run.extraction_failures;
          run.errors.push_back({"extract", stub.url, std::string(to_string(e.code())) + ": " + e.detail()});
          continue;
        }
        Article a;
        a.dedup_hash = ingest::dedup_key(extracted.body);
        a.id = ingest::article_id_for(a.dedup_hash);
        a.source_id = stub.source_id;
        a.url = stub.url;
        a.title = stub.title.empty() ? extracted.title : stub.title;
        a.body = std::move(extracted.body);
        a.language = eligible[s].language;
        a.published_at = stub.published_at;
        a.fetched_at = clock_();
        if (!seen_this_run.insert(a.dedup_hash).second || store_.has_hash(a.dedup_hash)) {
          ++run.deduped;
          continue;
        }
        a.topic_scores = features::topic_score_map(a, lexicons_);
        if (!store_.append_article(a)) {
          ++run.deduped;
          continue;
        }
        ++run.ingested;
        run.ingested_ids.push_back(a.id);
      }
    }

    if (options.train) {
      try {
        train_from_store(options.label_source);
        run.trained = true;
      } catch (const Error& e) {
        run.errors.push_back({"train", "", std::string(to_string(e.code())) + ": " + e.detail()});
      }
    }
    if (options.classify != ClassifyMode::Skip && has_model()) {
      try {
        run.classified = classify(run.ingested_ids);
      } catch (const Error& e) {
        run.errors.push_back({"classify", "", std::string(to_string(e.code())) + ": " + e.detail()});
      }
    } else if (options.classify == ClassifyMode::Require) {
      run.errors.push_back({"classify", "", "NoModel: no trained model"});
    }
    run.finished_at = clock_();
    return store_.append_run(run);
  }

  // --- training / classification ---

  bool has_model() const { return std::filesystem::exists(store_.model_path()); }

  classifier::ClassifierModel load_model() const {
    if (!has_model()) throw Error(ErrorCode::NoModel, "no trained model in " + store_.dir().string());
    return classifier::load_model(store_.model_path());
  }

  // article id -> class label for the chosen label source.
  std::map<std::string, std::string> training_labels(LabelSource source) const {
    std::map<std::string, std::string> labels;
    if (source == LabelSource::Operator) {
      labels = store_.operator_labels();
    } else {
      if (config_.fixture_labels_path.empty())
        throw Error(ErrorCode::InsufficientLabels, "no fixture_labels_path configured");
      std::ifstream in(config_.fixture_labels_path);
      if (!in) throw Error(ErrorCode::Io, "cannot open " + config_.fixture_labels_path.string());
      nlohmann::json j;
      in >> j;
      const auto by_url = j.get<std::map<std::string, std::string>>();
      for (const auto& a : store_.all())
        if (auto it = by_url.find(a.url); it != by_url.end()) labels[a.id] = it->second;
    }
    for (const auto& [id, label] : labels)
      if (std::find(config_.classes.begin(), config_.classes.end(), label) == config_.classes.end())
        throw Error(ErrorCode::UnknownClass, "label '" + label + "' on " + id + " is not a configured class");
    return labels;
  }

  // Deterministic split: within each class, articles ordered by id and the
  // last floor(n * holdout_fraction) held out (never the whole class).
  static std::pair<std::vector<std::string>, std::vector<std::string>> split_holdout(
      const std::map<std::string, std::string>& labels, double fraction) {
    std::map<std::string, std::vector<std::string>> per_class;
    for (const auto& [id, label] : labels) per_class[label].push_back(id);
    std::vector<std::string> train, holdout;
    for (auto& [label, ids] : per_class) {
      std::size_t h = static_cast<std::size_t>(static_cast<double>(ids.size()) * fraction);
      if (h >= ids.size()) h = ids.size() - 1;
      for (std::size_t i = 0; i < ids.size(); ++i) (i + h < ids.size() ? train : holdout).push_back(ids[i]);
    }
    std::sort(train.begin(), train.end());
    std::sort(holdout.begin(), holdout.end());
    return {train, holdout};
  }

  // Builds X and Y from labeled articles, trains, evaluates on the held-out
  // part and saves the model next to the store.
  TrainingOutcome train_from_store(LabelSource source, std::optional<features::FeatureMode> mode = std::nullopt,
                                   std::optional<classifier::Hyperparameters> hyper = std::nullopt) {
    const auto labels = training_labels(source);
    if (labels.empty()) throw Error(ErrorCode::InsufficientLabels, "no labeled articles in the store");
    std::set<std::string> distinct;
    for (const auto& [_, l] : labels) distinct.insert(l);
    if (distinct.size() < 2)
      throw Error(ErrorCode::DegenerateLabels, "labeled articles cover only one class");

    auto [train_ids, holdout_ids] = split_holdout(labels, config_.holdout_fraction);
    std::vector<Article> train_articles, holdout_articles;
    for (const auto& id : train_ids) train_articles.push_back(store_.get(id));
    for (const auto& id : holdout_ids) holdout_articles.push_back(store_.get(id));

    const auto feature_mode = mode.value_or(config_.feature_mode);
    classifier::FeatureSchema schema;
    schema.mode = feature_mode;
    if (feature_mode == features::FeatureMode::TopicRelevance) {
      schema.columns = features::topic_names(lexicons_);
    } else {
      const auto docs = features::to_documents(train_articles);
      schema.vocabulary = features::build_vocabulary(features::token_lists(docs), config_.vocabulary_min_df,
                                                     config_.vocabulary_max_terms);
      schema.columns = schema.vocabulary->terms;
    }
    const auto x = featurize(train_articles, schema);
    features::LabelVector y;
    for (const auto& id : train_ids) y.labels.push_back(labels.at(id));

    classifier::TrainOptions opts;
    opts.class_order = config_.classes;
    TrainingOutcome out;
    out.model = classifier::train(x, y, hyper.value_or(config_.classifier_hyper), opts);
    out.model.schema = schema;
    out.train_size = train_ids.size();
    out.holdout_ids = holdout_ids;
    if (!holdout_articles.empty()) {
      features::LabelVector y_holdout;
      for (const auto& id : holdout_ids) y_holdout.labels.push_back(labels.at(id));
      out.holdout_report = classifier::evaluate(out.model, featurize(holdout_articles, schema), y_holdout);
    }
    out.model_path = store_.model_path();
    classifier::save_model(out.model, out.model_path);
    return out;
  }

  features::FeatureMatrix featurize(std::span<const Article> articles, const classifier::FeatureSchema& schema) const {
    if (schema.mode == features::FeatureMode::TopicRelevance) {
      auto x = features::featurize_topics(articles, lexicons_);
      if (x.columns != schema.columns)
        throw Error(ErrorCode::SchemaMismatch, "configured lexicons differ from the model's topic columns");
      return x;
    }
    if (!schema.vocabulary) throw Error(ErrorCode::SchemaMismatch, "tf-idf schema without a vocabulary");
    return features::featurize_tfidf(articles, *schema.vocabulary);
  }

  // Predicts labels for the given articles (default: every article without
  // a label) and records them. Returns how many were labeled.
  std::size_t classify(std::optional<std::vector<std::string>> ids = std::nullopt) {
    const auto model = load_model();
    std::vector<Article> targets;
    if (ids) {
      for (const auto& id : *ids) {
        auto a = store_.get(id);
        if (!a.class_label) targets.push_back(std::move(a));
      }
    } else {
      for (auto& a : store_.all())
        if (!a.class_label) targets.push_back(std::move(a));
    }
    if (targets.empty()) return 0;
    std::sort(targets.begin(), targets.end(), [](const Article& a, const Article& b) { return a.id < b.id; });
    const auto predicted = classifier::predict(model, featurize(targets, model.schema));
    std::vector<LabelRecord> records;
    const auto now = clock_();
    for (std::size_t i = 0; i < targets.size(); ++i)
      records.push_back({targets[i].id, predicted.labels[i], LabelOrigin::Predicted, now});
    store_.append_labels(records);
    return records.size();
  }

  LabelRecord label_article(const std::string& article_id, const std::string& class_label) {
    if (std::find(config_.classes.begin(), config_.classes.end(), class_label) == config_.classes.end())
      throw Error(ErrorCode::UnknownClass, "'" + class_label + "' is not a configured class");
    store_.get(article_id);
    LabelRecord record{article_id, class_label, LabelOrigin::Operator, clock_()};
    store_.append_label(record);
    return record;
  }

  // --- translation ---

  // Translates one stored article (title as its own first chunk) and
  // persists the job, done or failed. Every call creates a new job.
  TranslationJob translate_article(const std::string& article_id, std::optional<std::string> backend_id = std::nullopt) {
    const auto article = store_.get(article_id);
    BackendEntry entry;
    {
      std::lock_guard lock(backends_mu_);
      if (!backend_id) {
        if (config_.backends.empty() && backends_.empty())
          throw Error(ErrorCode::UnknownBackend, "no translation backend configured");
        backend_id = config_.backends.empty() ? backends_.begin()->first : config_.backends.front().id;
      }
      auto it = backends_.find(*backend_id);
      if (it == backends_.end()) throw Error(ErrorCode::UnknownBackend, "no backend with id '" + *backend_id + "'");
      entry = it->second;
    }
    translation_slots_.acquire();
    struct Release {
      std::counting_semaphore<64>& s;
      ~Release() { s.release(); }
    } release{translation_slots_};
    auto job = translator::translate({article.id, article.title, article.body}, entry.spec, *entry.backend, retry_,
                                     clock_);
    return store_.append_job(std::move(job));
  }

  TranslationJob job(const std::string& id) const {
    if (auto j = store_.job(id)) return *j;
    throw Error(ErrorCode::UnknownJob, "no job with id '" + id + "'");
  }

 private:
  using FetchOutcome = std::variant<ingest::FeedResult, Error>;

  // Fetches sources with at most fetch_parallelism in flight; results keep
  // registry order.
  std::vector<FetchOutcome> fetch_all(const std::vector<ingest::Source>& sources) {
    std::vector<FetchOutcome> results(sources.size(), Error(ErrorCode::UnreachableSource, "not fetched"));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < sources.size(); i = next++) {
        try {
          results[i] = ingest::fetch_feed(sources[i], *fetcher_);
        } catch (const Error& e) {
          results[i] = e;
        } catch (const std::exception& e) {
          results[i] = Error(ErrorCode::UnreachableSource, e.what());
        }
      }
    };
    const auto n = std::min(config_.fetch_parallelism, sources.size());
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    return results;
  }

  Config config_;
  ArticleStore store_;
  mutable std::mutex registry_mu_;
  ingest::SourceRegistry registry_;
  std::vector<features::TopicLexicon> lexicons_;
  translator::Glossary glossary_;
  std::unique_ptr<ingest::Fetcher> fetcher_;
  std::function<Timestamp()> clock_;
  mutable std::mutex backends_mu_;
  std::map<std::string, BackendEntry> backends_;
  translator::RetryPolicy retry_;
  std::counting_semaphore<64> translation_slots_;
};

}  // namespace newsdesk::service
