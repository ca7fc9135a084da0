#pragma once

#include <charconv>
#include <filesystem>
#include <set>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "newsdesk/error.hpp"
#include "newsdesk/service/newsdesk.hpp"

namespace newsdesk::service {

namespace api_detail {

using nlohmann::json;

inline json error_body(ErrorCode code, const std::string& message) {
  return {{"error", to_string(code)}, {"message", message}};
}

inline void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

inline std::size_t parse_count(const std::string& name, const std::string& text) {
  std::size_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end)
    throw Error(ErrorCode::MalformedFilter, "'" + name + "' must be a non-negative integer");
  return value;
}

inline json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json j;
  try {
    j = json::parse(req.body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedRequest, std::string("request body is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::MalformedRequest, "request body must be a JSON object");
  return j;
}

inline void only_keys(const json& j, std::initializer_list<const char*> keys) {
  for (const auto& [key, _] : j.items())
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; }))
      throw Error(ErrorCode::MalformedRequest, "unexpected field '" + key + "'");
}

}  // namespace api_detail

// GET /api/articles query string -> ArticleQuery. Parameters: class, source,
// q, topic + min_score (together), limit, offset.
inline ArticleQuery article_query_from_params(const httplib::Params& params) {
  static const std::set<std::string> known{"class", "source", "q", "topic", "min_score", "limit", "offset"};
  ArticleQuery q;
  std::optional<std::string> topic, min_score;
  for (const auto& [key, value] : params) {
    if (!known.contains(key)) throw Error(ErrorCode::MalformedFilter, "unknown query parameter '" + key + "'");
    if (value.empty()) continue;
    if (key == "class") q.class_label = value;
    else if (key == "source") q.source_id = value;
    else if (key == "q") q.text_query = value;
    else if (key == "topic") topic = value;
    else if (key == "min_score") min_score = value;
    else if (key == "limit") q.limit = api_detail::parse_count(key, value);
    else if (key == "offset") q.offset = api_detail::parse_count(key, value);
  }
  if (topic.has_value() != min_score.has_value())
    throw Error(ErrorCode::MalformedFilter, "'topic' and 'min_score' must be given together");
  if (topic) {
    double threshold = 0.0;
    try {
      std::size_t used = 0;
      threshold = std::stod(*min_score, &used);
      if (used != min_score->size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorCode::MalformedFilter, "'min_score' must be a number");
    }
    q.topic_min_score = TopicThreshold{*topic, threshold};
  }
  return q;
}

inline nlohmann::json to_json(const ArticlePage& page, const ArticleQuery& q) {
  auto items = nlohmann::json::array();
  for (const auto& a : page.items) items.push_back(ingest::to_json(a));
  return {{"items", items}, {"total", page.total}, {"limit", q.limit}, {"offset", q.offset}};
}

// JSON over HTTP in front of a NewsDesk. Errors are {error, message} with
// the status from http_status().
class ApiServer {
 public:
  explicit ApiServer(NewsDesk& desk) : desk_(desk) { install_routes(); }

  httplib::Server& http() noexcept { return server_; }

  bool listen(const std::string& host, int port) { return server_.listen(host, port); }
  int bind_to_any_port(const std::string& host) { return server_.bind_to_any_port(host); }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() { server_.wait_until_ready(); }

 private:
  void install_routes() {
    using api_detail::send_json;
    using nlohmann::json;

    server_.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const Error& e) {
        send_json(res, api_detail::error_body(e.code(), e.detail()), http_status(e.code()));
      } catch (const nlohmann::json::exception& e) {
        send_json(res, api_detail::error_body(ErrorCode::MalformedRequest, e.what()), 400);
      } catch (const std::exception& e) {
        send_json(res, {{"error", "Internal"}, {"message", e.what()}}, 500);
      }
    });
    server_.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty() && res.status == 404)
        send_json(res, {{"error", "NotFound"}, {"message", "no such endpoint"}}, 404);
    });

    server_.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, {{"status", "ok"}});
    });

    server_.Get("/api/articles", [this](const httplib::Request& req, httplib::Response& res) {
      const auto q = article_query_from_params(req.params);
      desk_.store().refresh();
      send_json(res, to_json(desk_.store().query(q), q));
    });

    server_.Get(R"(/api/articles/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      desk_.store().refresh();
      send_json(res, ingest::to_json(desk_.store().get(req.matches[1])));
    });

    server_.Post(R"(/api/articles/([^/]+)/translate)", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = api_detail::parse_body(req);
      api_detail::only_keys(body, {"backend_id"});
      std::optional<std::string> backend;
      if (body.contains("backend_id")) {
        if (!body["backend_id"].is_string()) throw Error(ErrorCode::MalformedRequest, "backend_id must be a string");
        backend = body["backend_id"].get<std::string>();
      }
      desk_.store().refresh();
      const auto job = desk_.translate_article(req.matches[1], backend);
      if (job.status == translator::JobStatus::Failed && job.error) {
        auto err = api_detail::error_body(job.error->code, job.error->message);
        err["job"] = translator::to_json(job);
        send_json(res, err, http_status(job.error->code));
        return;
      }
      send_json(res, translator::to_json(job), 201);
    });

    server_.Get(R"(/api/jobs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      desk_.store().refresh();
      send_json(res, translator::to_json(desk_.job(req.matches[1])));
    });

    server_.Get("/api/sources", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, desk_.sources().to_json());
    });

    server_.Post("/api/sources", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = api_detail::parse_body(req);
      send_json(res, ingest::to_json(desk_.add_source(ingest::source_from_json(body))), 201);
    });

    server_.Patch(R"(/api/sources/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = api_detail::parse_body(req);
      api_detail::only_keys(body, {"enabled", "republish_permitted", "license_note"});
      ingest::SourcePatch patch;
      auto flag = [&](const char* key, std::optional<bool>& out) {
        if (!body.contains(key)) return;
        if (!body[key].is_boolean()) throw Error(ErrorCode::MalformedRequest, std::string(key) + " must be a boolean");
        out = body[key].get<bool>();
      };
      flag("enabled", patch.enabled);
      flag("republish_permitted", patch.republish_permitted);
      if (body.contains("license_note")) {
        if (!body["license_note"].is_string()) throw Error(ErrorCode::MalformedRequest, "license_note must be a string");
        patch.license_note = body["license_note"].get<std::string>();
      }
      send_json(res, ingest::to_json(desk_.patch_source(req.matches[1], patch)));
    });

    server_.Post("/api/labels", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = api_detail::parse_body(req);
      api_detail::only_keys(body, {"article_id", "class_label"});
      if (!body.contains("article_id") || !body["article_id"].is_string() || !body.contains("class_label") ||
          !body["class_label"].is_string())
        throw Error(ErrorCode::MalformedRequest, "body must be {article_id: string, class_label: string}");
      desk_.store().refresh();
      const auto record = desk_.label_article(body["article_id"].get<std::string>(), body["class_label"].get<std::string>());
      send_json(res, to_json(record), 201);
    });

    server_.Get("/api/runs/latest", [this](const httplib::Request&, httplib::Response& res) {
      desk_.store().refresh();
      const auto run = desk_.store().latest_run();
      if (!run) throw Error(ErrorCode::NoRuns, "no pipeline run recorded yet");
      send_json(res, to_json(*run));
    });

    server_.Get("/api/backends", [this](const httplib::Request&, httplib::Response& res) {
      auto arr = json::array();
      for (const auto& spec : desk_.backends()) arr.push_back(translator::to_json(spec));
      send_json(res, arr);
    });

    server_.Get("/api/classes", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, desk_.config().classes);
    });

    const auto& static_dir = desk_.config().static_dir;
    if (!static_dir.empty() && std::filesystem::is_directory(static_dir)) server_.set_mount_point("/", static_dir.string());
  }

  NewsDesk& desk_;
  httplib::Server server_;
};

}  // namespace newsdesk::service
