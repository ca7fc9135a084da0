#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "newsdesk/error.hpp"
#include "newsdesk/time.hpp"
#include "newsdesk/translator/backend.hpp"
#include "newsdesk/translator/chunk.hpp"
#include "newsdesk/translator/qa.hpp"

namespace newsdesk::translator {

enum class JobStatus { Pending, Done, Failed };

constexpr std::string_view to_string(JobStatus s) {
  switch (s) {
    case JobStatus::Pending: return "pending";
    case JobStatus::Done: return "done";
    case JobStatus::Failed: return "failed";
  }
  return "pending";
}

inline JobStatus parse_job_status(std::string_view s) {
  if (s == "done") return JobStatus::Done;
  if (s == "failed") return JobStatus::Failed;
  return JobStatus::Pending;
}

struct JobError {
  ErrorCode code;
  std::string message;
  friend bool operator==(const JobError&, const JobError&) = default;
};

struct TranslationJob {
  std::string id;
  std::string article_id;
  std::string source_text;
  std::vector<std::string> chunks;
  std::vector<std::size_t> oversized_chunks;  // indices into chunks
  std::string backend_id;
  JobStatus status = JobStatus::Pending;
  std::string output_text;
  std::optional<QAReport> qa;
  std::optional<JobError> error;
  std::size_t backend_calls = 0;
  Timestamp created_at{};
  std::optional<Timestamp> finished_at;

  friend bool operator==(const TranslationJob&, const TranslationJob&) = default;
};

struct TranslationRequest {
  std::string article_id;  // empty for raw text
  std::string title;       // translated as its own first chunk when non-empty
  std::string text;
};

struct RetryPolicy {
  std::chrono::milliseconds initial_backoff{0};  // doubled after each failed attempt
};

// Chunks the request, sends every chunk through `backend` in order
// (retrying BackendUnavailable up to spec.max_retries times per chunk),
// joins the results with '\n' and runs the QA battery. A failing QA report
// still yields a done job; only backend failures mark it failed.
inline TranslationJob translate(const TranslationRequest& request, const TranslationBackendSpec& spec,
                                TranslationBackend& backend, const RetryPolicy& retry = {},
                                const std::function<Timestamp()>& clock = now_utc) {
  if (request.text.find_first_not_of(" \t\r\n") == std::string::npos && request.title.empty())
    throw Error(ErrorCode::EmptyInput, "nothing to translate");

  TranslationJob job;
  job.article_id = request.article_id;
  job.backend_id = spec.id;
  job.created_at = clock();
  if (!request.title.empty()) {
    job.source_text = request.title + "\n" + request.text;
    job.chunks.push_back(request.title);
    if (unicode::length(request.title) > spec.max_chunk_chars) job.oversized_chunks.push_back(0);
  } else {
    job.source_text = request.text;
  }
  for (auto& c : chunk_text(request.text, spec.max_chunk_chars)) {
    if (c.oversized) job.oversized_chunks.push_back(job.chunks.size());
    job.chunks.push_back(std::move(c.text));
  }

  std::vector<std::string> translated;
  try {
    for (const auto& chunk : job.chunks) {
      auto backoff = retry.initial_backoff;
      for (int attempt = 0;; ++attempt) {
        ++job.backend_calls;
        try {
          translated.push_back(backend.translate_chunk(chunk));
          break;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::BackendUnavailable) throw;
          if (attempt >= spec.max_retries)
            throw Error(ErrorCode::BackendUnavailable,
                        e.detail() + " (after " + std::to_string(attempt + 1) + " attempts)");
        }
        if (backoff.count() > 0) {
          std::this_thread::sleep_for(backoff);
          backoff *= 2;
        }
      }
    }
  } catch (const Error& e) {
    const auto code = e.code() == ErrorCode::BackendUnavailable ? ErrorCode::BackendUnavailable
                                                                 : ErrorCode::BackendRefusal;
    job.status = JobStatus::Failed;
    job.error = JobError{code, e.detail()};
    job.finished_at = clock();
    return job;
  }

  std::string output;
  for (std::size_t i = 0; i < translated.size(); ++i) {
    if (i) output.push_back('\n');
    output += translated[i];
  }
  if (output.find_first_not_of(" \t\r\n") == std::string::npos) {
    job.status = JobStatus::Failed;
    job.error = JobError{ErrorCode::BackendRefusal, "backend returned an empty translation"};
    job.finished_at = clock();
    return job;
  }
  job.output_text = std::move(output);
  job.qa = qa_check(job.source_text, job.output_text);
  job.status = JobStatus::Done;
  job.finished_at = clock();
  return job;
}

inline nlohmann::json to_json(const TranslationJob& job) {
  nlohmann::json j{{"id", job.id},
                   {"article_id", job.article_id},
                   {"source_text", job.source_text},
                   {"chunks", job.chunks},
                   {"oversized_chunks", job.oversized_chunks},
                   {"backend_id", job.backend_id},
                   {"status", to_string(job.status)},
                   {"output_text", job.output_text},
                   {"qa", nullptr},
                   {"error", nullptr},
                   {"backend_calls", job.backend_calls},
                   {"created_at", format_iso8601(job.created_at)},
                   {"finished_at", nullptr}};
  if (job.qa) j["qa"] = to_json(*job.qa);
  if (job.error) j["error"] = {{"code", to_string(job.error->code)}, {"message", job.error->message}};
  if (job.finished_at) j["finished_at"] = format_iso8601(*job.finished_at);
  return j;
}

inline ErrorCode parse_job_error_code(std::string_view s) {
  return s == "BackendUnavailable" ? ErrorCode::BackendUnavailable : ErrorCode::BackendRefusal;
}

inline TranslationJob job_from_json(const nlohmann::json& j) {
  try {
    TranslationJob job;
    job.id = j.at("id").get<std::string>();
    job.article_id = j.at("article_id").get<std::string>();
    job.source_text = j.at("source_text").get<std::string>();
    job.chunks = j.at("chunks").get<std::vector<std::string>>();
    job.oversized_chunks = j.value("oversized_chunks", std::vector<std::size_t>{});
    job.backend_id = j.at("backend_id").get<std::string>();
    job.status = parse_job_status(j.at("status").get<std::string>());
    job.output_text = j.at("output_text").get<std::string>();
    if (j.contains("qa") && j["qa"].is_object()) job.qa = qa_from_json(j["qa"]);
    if (j.contains("error") && j["error"].is_object())
      job.error = JobError{parse_job_error_code(j["error"].at("code").get<std::string>()),
                           j["error"].at("message").get<std::string>()};
    job.backend_calls = j.value("backend_calls", std::size_t{0});
    job.created_at = parse_iso8601(j.at("created_at").get<std::string>()).value_or(Timestamp{});
    if (j.contains("finished_at") && j["finished_at"].is_string())
      job.finished_at = parse_iso8601(j["finished_at"].get<std::string>());
    return job;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::StoreCorrupt, std::string("job record: ") + e.what());
  }
}

}  // namespace newsdesk::translator
