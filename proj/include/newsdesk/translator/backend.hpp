#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <string_view>

#include <json.hpp>

#include "newsdesk/error.hpp"
#include "newsdesk/translator/chunk.hpp"
#include "newsdesk/translator/glossary.hpp"
#include "newsdesk/translator/mock.hpp"
#include "newsdesk/url.hpp"

namespace newsdesk::translator {

enum class BackendKind { RemoteLlm, MockGlossary };

constexpr std::string_view to_string(BackendKind k) {
  return k == BackendKind::RemoteLlm ? "remote_llm" : "mock_glossary";
}

inline constexpr std::string_view kTextPlaceholder = "{text}";

struct TranslationBackendSpec {
  std::string id;
  BackendKind kind = BackendKind::MockGlossary;
  std::string endpoint;     // remote only
  std::string model_name;   // remote only
  std::string prompt_template = "Translate the following English news text into Bangla:\n\n{text}";
  std::size_t max_chunk_chars = 1500;
  std::chrono::milliseconds timeout{30000};
  int max_retries = 2;
  // Dotted path to the translated text in the response body, e.g.
  // "choices.0.message.content".
  std::string response_path = "text";

  friend bool operator==(const TranslationBackendSpec&, const TranslationBackendSpec&) = default;
};

inline std::size_t count_occurrences(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + needle.size())) ++n;
  return n;
}

inline void validate(const TranslationBackendSpec& s) {
  if (s.id.empty()) throw Error(ErrorCode::InvalidBackend, "backend id is empty");
  if (count_occurrences(s.prompt_template, kTextPlaceholder) != 1)
    throw Error(ErrorCode::InvalidBackend, "backend '" + s.id + "': prompt_template needs exactly one {text}");
  if (s.max_chunk_chars < kMinChunkChars)
    throw Error(ErrorCode::InvalidBackend, "backend '" + s.id + "': max_chunk_chars must be >= 200");
  if (s.max_retries < 0) throw Error(ErrorCode::InvalidBackend, "backend '" + s.id + "': max_retries < 0");
  if (s.kind == BackendKind::RemoteLlm) {
    if (!is_absolute_url(s.endpoint))
      throw Error(ErrorCode::InvalidBackend, "backend '" + s.id + "': endpoint is not an absolute URL");
    if (s.model_name.empty()) throw Error(ErrorCode::InvalidBackend, "backend '" + s.id + "': model_name is empty");
  }
}

inline std::string render_prompt(std::string_view tmpl, std::string_view text) {
  std::string out(tmpl);
  const auto pos = out.find(kTextPlaceholder);
  out.replace(pos, kTextPlaceholder.size(), text);
  return out;
}

inline nlohmann::json to_json(const TranslationBackendSpec& s) {
  return {{"id", s.id},
          {"kind", to_string(s.kind)},
          {"endpoint", s.endpoint},
          {"model_name", s.model_name},
          {"prompt_template", s.prompt_template},
          {"max_chunk_chars", s.max_chunk_chars},
          {"timeout_ms", s.timeout.count()},
          {"max_retries", s.max_retries},
          {"response_path", s.response_path}};
}

inline TranslationBackendSpec backend_spec_from_json(const nlohmann::json& j) {
  try {
    TranslationBackendSpec s;
    s.id = j.at("id").get<std::string>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "remote_llm") s.kind = BackendKind::RemoteLlm;
    else if (kind == "mock_glossary") s.kind = BackendKind::MockGlossary;
    else throw Error(ErrorCode::InvalidBackend, "unknown backend kind '" + kind + "'");
    s.endpoint = j.value("endpoint", "");
    s.model_name = j.value("model_name", "");
    s.prompt_template = j.value("prompt_template", s.prompt_template);
    s.max_chunk_chars = j.value("max_chunk_chars", s.max_chunk_chars);
    s.timeout = std::chrono::milliseconds{j.value("timeout_ms", static_cast<long long>(s.timeout.count()))};
    s.max_retries = j.value("max_retries", s.max_retries);
    s.response_path = j.value("response_path", s.response_path);
    validate(s);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidBackend, std::string("backend spec: ") + e.what());
  }
}

// One chunk in, one translated chunk out. Throw Error(BackendUnavailable)
// for failures worth retrying and Error(BackendRefusal) for the rest.
class TranslationBackend {
 public:
  virtual ~TranslationBackend() = default;
  virtual std::string translate_chunk(std::string_view chunk) = 0;
};

class MockGlossaryBackend final : public TranslationBackend {
 public:
  explicit MockGlossaryBackend(Glossary glossary) : glossary_(std::move(glossary)) {}

  std::string translate_chunk(std::string_view chunk) override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    return mock_translate(chunk, glossary_);
  }

  std::size_t calls() const noexcept { return calls_.load(std::memory_order_relaxed); }

 private:
  Glossary glossary_;
  std::atomic<std::size_t> calls_{0};
};

}  // namespace newsdesk::translator
