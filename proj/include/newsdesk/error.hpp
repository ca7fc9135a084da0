#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace newsdesk {

// Every failure the library reports carries one of these codes. The names are
// the wire names used in API error bodies.
enum class ErrorCode {
  // ingest
  UnreachableSource,
  MalformedFeed,
  UnknownSource,
  InvalidSource,
  UndecodablePayload,
  EmptyAfterExtraction,
  // features
  EmptyCorpus,
  EmptyLexicons,
  SchemaMismatch,
  // classifier
  NonFiniteInput,
  LengthMismatch,
  DegenerateLabels,
  NonFiniteLoss,
  UnknownClass,
  // translator
  BackendUnavailable,
  BackendRefusal,
  EmptyInput,
  InvalidBackend,
  // service
  NoEligibleSources,
  NoModel,
  InsufficientLabels,
  UnknownArticle,
  UnknownBackend,
  UnknownJob,
  NoRuns,
  MalformedFilter,
  MalformedRequest,
  InvalidConfig,
  StoreCorrupt,
  StoreLocked,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnreachableSource: return "UnreachableSource";
    case ErrorCode::MalformedFeed: return "MalformedFeed";
    case ErrorCode::UnknownSource: return "UnknownSource";
    case ErrorCode::InvalidSource: return "InvalidSource";
    case ErrorCode::UndecodablePayload: return "UndecodablePayload";
    case ErrorCode::EmptyAfterExtraction: return "EmptyAfterExtraction";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::EmptyLexicons: return "EmptyLexicons";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::BackendRefusal: return "BackendRefusal";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidBackend: return "InvalidBackend";
    case ErrorCode::NoEligibleSources: return "NoEligibleSources";
    case ErrorCode::NoModel: return "NoModel";
    case ErrorCode::InsufficientLabels: return "InsufficientLabels";
    case ErrorCode::UnknownArticle: return "UnknownArticle";
    case ErrorCode::UnknownBackend: return "UnknownBackend";
    case ErrorCode::UnknownJob: return "UnknownJob";
    case ErrorCode::NoRuns: return "NoRuns";
    case ErrorCode::MalformedFilter: return "MalformedFilter";
    case ErrorCode::MalformedRequest: return "MalformedRequest";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::StoreCorrupt: return "StoreCorrupt";
    case ErrorCode::StoreLocked: return "StoreLocked";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

// HTTP status used by the API layer for each code.
constexpr int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownSource:
    case ErrorCode::UnknownArticle:
    case ErrorCode::UnknownBackend:
    case ErrorCode::UnknownJob:
    case ErrorCode::NoRuns:
      return 404;
    case ErrorCode::MalformedFilter:
    case ErrorCode::MalformedRequest:
    case ErrorCode::InvalidSource:
    case ErrorCode::InvalidBackend:
    case ErrorCode::EmptyInput:
    case ErrorCode::UnknownClass:
    case ErrorCode::LengthMismatch:
    case ErrorCode::NonFiniteInput:
      return 400;
    case ErrorCode::NoEligibleSources:
    case ErrorCode::NoModel:
    case ErrorCode::SchemaMismatch:
    case ErrorCode::StoreLocked:
      return 409;
    case ErrorCode::DegenerateLabels:
    case ErrorCode::InsufficientLabels:
    case ErrorCode::EmptyCorpus:
    case ErrorCode::EmptyLexicons:
    case ErrorCode::EmptyAfterExtraction:
    case ErrorCode::UndecodablePayload:
    case ErrorCode::NonFiniteLoss:
      return 422;
    case ErrorCode::BackendRefusal:
    case ErrorCode::UnreachableSource:
    case ErrorCode::MalformedFeed:
      return 502;
    case ErrorCode::BackendUnavailable:
      return 503;
    case ErrorCode::InvalidConfig:
    case ErrorCode::StoreCorrupt:
    case ErrorCode::Io:
      return 500;
  }
  return 500;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace newsdesk
