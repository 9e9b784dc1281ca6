#include "intent_router/error.hpp"

namespace intent_router {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kInvalidDim: return "InvalidDim";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kTransport: return "TransportError";
    case ErrorCode::kProtocol: return "ProtocolError";
    case ErrorCode::kAuth: return "AuthError";
    case ErrorCode::kNoRoutes: return "NoRoutes";
    case ErrorCode::kDuplicateRouteName: return "DuplicateRouteName";
    case ErrorCode::kEmptyUtterances: return "EmptyUtterances";
    case ErrorCode::kInsufficientSamples: return "InsufficientSamples";
    case ErrorCode::kEmptyTrainSet: return "EmptyTrainSet";
    case ErrorCode::kInsufficientPrompts: return "InsufficientPrompts";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kMissingField: return "MissingField";
    case ErrorCode::kValidationFailure: return "ValidationFailure";
    case ErrorCode::kEmptyResponse: return "EmptyResponse";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kUnmappedRoute: return "UnmappedRoute";
    case ErrorCode::kSinkUnavailable: return "SinkUnavailable";
    case ErrorCode::kSerialization: return "SerializationError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

RemoteError::RemoteError(ErrorCode code, const std::string& message, std::size_t first,
                         std::size_t last)
    : Error(code, message + " (batch inputs [" + std::to_string(first) + ", " +
                      std::to_string(last) + "))"),
      first_(first),
      last_(last) {}

ParseError::ParseError(const std::string& message, std::size_t line)
    : Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + message), line_(line) {}

SinkUnavailable::SinkUnavailable(const std::string& message, int attempts, int last_status)
    : Error(ErrorCode::kSinkUnavailable,
            message + " after " + std::to_string(attempts) + " attempt(s)"),
      attempts_(attempts),
      last_status_(last_status) {}

namespace {
std::string join_problems(const std::vector<std::string>& problems) {
  std::string out;
  for (const auto& p : problems) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}
}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error(ErrorCode::kConfig, join_problems(problems)), problems_(std::move(problems)) {}

}  // namespace intent_router
