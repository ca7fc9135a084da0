#pragma once

#include <cstdlib>
#include <string>
#include <string_view>

#include <httplib.h>
#include <json.hpp>

#include "newsdesk/error.hpp"
#include "newsdesk/translator/backend.hpp"
#include "newsdesk/url.hpp"

namespace newsdesk::translator {

inline constexpr const char* kApiKeyEnv = "BANGLA_AI_API_KEY";

// Follows a dotted path ("choices.0.message.content") into a JSON value.
inline const nlohmann::json* json_at_path(const nlohmann::json& root, std::string_view path) {
  const nlohmann::json* node = &root;
  while (!path.empty()) {
    const auto dot = path.find('.');
    const auto key = std::string(path.substr(0, dot));
    path = dot == std::string_view::npos ? std::string_view{} : path.substr(dot + 1);
    if (node->is_array()) {
      char* end = nullptr;
      const auto idx = std::strtoul(key.c_str(), &end, 10);
      if (key.empty() || *end != '\0' || idx >= node->size()) return nullptr;
      node = &(*node)[idx];
    } else if (node->is_object()) {
      auto it = node->find(key);
      if (it == node->end()) return nullptr;
      node = &*it;
    } else {
      return nullptr;
    }
  }
  return node;
}

// HTTP JSON backend: POST {model, prompt} per chunk, read the translated text
// from `response_path`. The bearer token comes from BANGLA_AI_API_KEY and is
// never included in error messages.
class RemoteLlmBackend final : public TranslationBackend {
 public:
  explicit RemoteLlmBackend(TranslationBackendSpec spec, std::string api_key = env_api_key())
      : spec_(std::move(spec)), api_key_(std::move(api_key)) {
    const auto parts = parse_url(spec_.endpoint);
    if (!parts) throw Error(ErrorCode::InvalidBackend, "endpoint is not an absolute URL");
    base_ = parts->scheme + "://" + parts->authority;
    path_ = parts->path.empty() ? "/" : parts->path;
  }

  static std::string env_api_key() {
    const char* key = std::getenv(kApiKeyEnv);
    return key ? key : "";
  }

  std::string translate_chunk(std::string_view chunk) override {
    httplib::Client client(base_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(spec_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(spec_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    const nlohmann::json request{{"model", spec_.model_name}, {"prompt", render_prompt(spec_.prompt_template, chunk)}};
    auto res = client.Post(path_, headers, request.dump(), "application/json");
    if (!res)
      throw Error(ErrorCode::BackendUnavailable,
                  "backend '" + spec_.id + "': " + httplib::to_string(res.error()));
    if (res->status == 429 || res->status >= 500)
      throw Error(ErrorCode::BackendUnavailable,
                  "backend '" + spec_.id + "': HTTP " + std::to_string(res->status) + ": " + res->body);
    if (res->status < 200 || res->status >= 300)
      throw Error(ErrorCode::BackendRefusal,
                  "backend '" + spec_.id + "': HTTP " + std::to_string(res->status) + ": " + res->body);
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorCode::BackendRefusal, "backend '" + spec_.id + "': response is not JSON: " + res->body);
    }
    const auto* text = json_at_path(body, spec_.response_path);
    if (!text || !text->is_string())
      throw Error(ErrorCode::BackendRefusal, "backend '" + spec_.id + "': no string at '" + spec_.response_path +
                                                 "' in response: " + res->body);
    return text->get<std::string>();
  }

 private:
  TranslationBackendSpec spec_;
  std::string api_key_;
  std::string base_;
  std::string path_;
};

}  // namespace newsdesk::translator
