#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "newsdesk/error.hpp"
#include "newsdesk/time.hpp"

namespace newsdesk::service {

struct RunIssue {
  std::string stage;    // gate | fetch | feed | extract | classify | train
  std::string subject;  // source or article id / url
  std::string reason;
  friend bool operator==(const RunIssue&, const RunIssue&) = default;
};

// Bookkeeping for one ingest/featurize/classify pass.
// ingested == articles_fetched - deduped - gate_denied - extraction_failures.
struct PipelineRun {
  std::string run_id;
  Timestamp started_at{};
  Timestamp finished_at{};
  std::size_t sources_polled = 0;
  std::size_t sources_denied = 0;
  std::size_t articles_fetched = 0;
  std::size_t ingested = 0;
  std::size_t deduped = 0;
  std::size_t gate_denied = 0;
  std::size_t extraction_failures = 0;
  std::size_t classified = 0;
  bool trained = false;
  std::vector<std::string> ingested_ids;
  std::vector<RunIssue> errors;

  friend bool operator==(const PipelineRun&, const PipelineRun&) = default;
};

inline nlohmann::json to_json(const PipelineRun& r) {
  auto errors = nlohmann::json::array();
  for (const auto& e : r.errors) errors.push_back({{"stage", e.stage}, {"subject", e.subject}, {"reason", e.reason}});
  return {{"run_id", r.run_id},
          {"started_at", format_iso8601(r.started_at)},
          {"finished_at", format_iso8601(r.finished_at)},
          {"sources_polled", r.sources_polled},
          {"sources_denied", r.sources_denied},
          {"articles_fetched", r.articles_fetched},
          {"ingested", r.ingested},
          {"deduped", r.deduped},
          {"gate_denied", r.gate_denied},
          {"extraction_failures", r.extraction_failures},
          {"classified", r.classified},
          {"trained", r.trained},
          {"ingested_ids", r.ingested_ids},
          {"errors", errors}};
}

inline PipelineRun run_from_json(const nlohmann::json& j) {
  try {
    PipelineRun r;
    r.run_id = j.at("run_id").get<std::string>();
    r.started_at = parse_iso8601(j.at("started_at").get<std::string>()).value_or(Timestamp{});
    r.finished_at = parse_iso8601(j.at("finished_at").get<std::string>()).value_or(Timestamp{});
    r.sources_polled = j.at("sources_polled").get<std::size_t>();
    r.sources_denied = j.value("sources_denied", std::size_t{0});
    r.articles_fetched = j.at("articles_fetched").get<std::size_t>();
    r.ingested = j.at("ingested").get<std::size_t>();
    r.deduped = j.at("deduped").get<std::size_t>();
    r.gate_denied = j.at("gate_denied").get<std::size_t>();
    r.extraction_failures = j.at("extraction_failures").get<std::size_t>();
    r.classified = j.at("classified").get<std::size_t>();
    r.trained = j.value("trained", false);
    r.ingested_ids = j.value("ingested_ids", std::vector<std::string>{});
    for (const auto& e : j.at("errors"))
      r.errors.push_back({e.at("stage").get<std::string>(), e.at("subject").get<std::string>(),
                          e.at("reason").get<std::string>()});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::StoreCorrupt, std::string("run record: ") + e.what());
  }
}

}  // namespace newsdesk::service
