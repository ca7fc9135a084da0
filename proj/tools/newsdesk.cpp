#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "newsdesk/newsdesk.hpp"

namespace nd = newsdesk;

namespace {

nd::service::Config load(const std::string& config_path, const std::string& store_override) {
  auto config = nd::service::load_config(config_path);
  if (!store_override.empty()) config.store_dir = store_override;
  return config;
}

void print(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

nd::service::ClassifyMode parse_classify(const std::string& s) {
  if (s == "auto") return nd::service::ClassifyMode::Auto;
  if (s == "required") return nd::service::ClassifyMode::Require;
  if (s == "skip") return nd::service::ClassifyMode::Skip;
  throw nd::Error(nd::ErrorCode::InvalidConfig, "--classify must be auto, required or skip");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bangla community newsdesk: ingest, classify and translate local news"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path = "newsdesk.json";
  std::string store_override;
  app.add_option("-c,--config", config_path, "config file")->capture_default_str();
  app.add_option("--store", store_override, "override the store directory");

  auto* ingest = app.add_subcommand("ingest", "poll sources, extract, dedup, classify");
  bool ingest_train = false;
  std::string classify_mode = "auto";
  std::string ingest_labels = "fixture";
  ingest->add_flag("--train", ingest_train, "train a model from labels after ingesting");
  ingest->add_option("--classify", classify_mode, "auto | required | skip")->capture_default_str();
  ingest->add_option("--labels", ingest_labels, "fixture | operator")->capture_default_str();

  auto* train = app.add_subcommand("train", "train the classifier from labeled articles");
  std::string train_mode;
  std::string train_labels = "fixture";
  train->add_option("--mode", train_mode, "topic_relevance | tfidf");
  train->add_option("--labels", train_labels, "fixture | operator")->capture_default_str();

  auto* classify = app.add_subcommand("classify", "label unlabeled articles with the current model");

  auto* label = app.add_subcommand("label", "record an operator label");
  std::string label_article, label_class;
  label->add_option("article", label_article)->required();
  label->add_option("class", label_class)->required();

  auto* translate = app.add_subcommand("translate", "translate one article into Bangla");
  std::string translate_article;
  std::string backend;
  translate->add_option("article", translate_article)->required();
  translate->add_option("--backend", backend, "backend id");

  auto* list = app.add_subcommand("articles", "list stored articles");
  std::string list_class, list_source, list_q;
  std::size_t list_limit = 20;
  list->add_option("--class", list_class);
  list->add_option("--source", list_source);
  list->add_option("--q", list_q);
  list->add_option("--limit", list_limit)->capture_default_str();

  auto* features = app.add_subcommand("features", "write the feature matrix of stored articles as CSV");
  std::string features_mode = "topic_relevance";
  std::string features_out;
  features->add_option("--mode", features_mode)->capture_default_str();
  features->add_option("-o,--out", features_out, "output file (stdout if omitted)");

  auto* serve = app.add_subcommand("serve", "run the HTTP API");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();

  auto* fixtures = app.add_subcommand("fixtures", "synthetic fixture corpus");
  fixtures->require_subcommand(1);
  auto* generate = fixtures->add_subcommand("generate", "write the seeded corpus, feeds, lexicons and glossary");
  std::uint64_t seed = nd::service::fixtures::kDefaultSeed;
  std::string fixtures_out = "fixtures";
  generate->add_option("--seed", seed)->capture_default_str();
  generate->add_option("-o,--out", fixtures_out)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fixtures) {
      nd::service::fixtures::write_fixture_files(fixtures_out, seed);
      std::cout << "wrote fixtures to " << fixtures_out << "\n";
      return 0;
    }

    nd::service::NewsDesk desk(load(config_path, store_override));

    if (*ingest) {
      nd::service::PipelineOptions opts;
      opts.classify = parse_classify(classify_mode);
      opts.train = ingest_train;
      opts.label_source = nd::service::parse_label_source(ingest_labels);
      print(nd::service::to_json(desk.run_pipeline(opts)));
    } else if (*train) {
      std::optional<nd::features::FeatureMode> mode;
      if (!train_mode.empty()) mode = nd::features::parse_feature_mode(train_mode);
      const auto outcome = desk.train_from_store(nd::service::parse_label_source(train_labels), mode);
      nlohmann::json out{{"model_path", outcome.model_path.string()},
                         {"classes", outcome.model.classes},
                         {"train_size", outcome.train_size},
                         {"holdout_size", outcome.holdout_ids.size()},
                         {"stop_reason", nd::classifier::to_string(outcome.model.meta.stop_reason)},
                         {"epochs_run", outcome.model.meta.epochs_run},
                         {"final_loss", outcome.model.meta.final_loss}};
      if (outcome.holdout_report) out["holdout"] = nd::classifier::to_json(*outcome.holdout_report);
      print(out);
    } else if (*classify) {
      print({{"classified", desk.classify()}});
    } else if (*label) {
      const auto rec = desk.label_article(label_article, label_class);
      print({{"article_id", rec.article_id}, {"class_label", rec.class_label}});
    } else if (*translate) {
      const auto job = desk.translate_article(
          translate_article, backend.empty() ? std::nullopt : std::optional<std::string>(backend));
      print(nd::translator::to_json(job));
      return job.status == nd::translator::JobStatus::Done ? 0 : 1;
    } else if (*list) {
      nd::service::ArticleQuery q;
      if (!list_class.empty()) q.class_label = list_class;
      if (!list_source.empty()) q.source_id = list_source;
      if (!list_q.empty()) q.text_query = list_q;
      q.limit = list_limit;
      print(nd::service::to_json(desk.store().query(q), q));
    } else if (*features) {
      const auto all = desk.store().all();
      const auto mode = nd::features::parse_feature_mode(features_mode);
      nd::classifier::FeatureSchema schema;
      schema.mode = mode;
      if (mode == nd::features::FeatureMode::Tfidf) {
        const auto docs = nd::features::to_documents(all);
        schema.vocabulary = nd::features::build_vocabulary(nd::features::token_lists(docs),
                                                           desk.config().vocabulary_min_df,
                                                           desk.config().vocabulary_max_terms);
        schema.columns = schema.vocabulary->terms;
      } else {
        schema.columns = nd::features::topic_names(desk.lexicons());
      }
      const auto x = desk.featurize(all, schema);
      if (features_out.empty()) {
        nd::features::write_csv(std::cout, x);
      } else {
        std::ofstream out(features_out);
        nd::features::write_csv(out, x);
      }
    } else if (*serve) {
      nd::service::ApiServer server(desk);
      std::cerr << "listening on http://" << host << ":" << port << "\n";
      if (!server.listen(host, port)) {
        std::cerr << "cannot bind " << host << ":" << port << "\n";
        return 1;
      }
    }
  } catch (const nd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
