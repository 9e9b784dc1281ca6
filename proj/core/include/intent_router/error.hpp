#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace intent_router {

enum class ErrorCode {
  kEmptyInput,
  kInvalidDim,
  kInvalidArgument,
  kDimensionMismatch,
  kTransport,
  kProtocol,
  kAuth,
  kNoRoutes,
  kDuplicateRouteName,
  kEmptyUtterances,
  kInsufficientSamples,
  kEmptyTrainSet,
  kInsufficientPrompts,
  kParse,
  kMissingField,
  kValidationFailure,
  kEmptyResponse,
  kConfig,
  kUnmappedRoute,
  kSinkUnavailable,
  kSerialization,
  kIo,
};

std::string_view to_string(ErrorCode code) noexcept;

// Base of every error raised by the library. Callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Transport/protocol/auth failures of a remote batch call, tagged with the
// half-open range of input indices that were in flight.
class RemoteError : public Error {
 public:
  RemoteError(ErrorCode code, const std::string& message, std::size_t first, std::size_t last);

  [[nodiscard]] std::size_t first_index() const noexcept { return first_; }
  [[nodiscard]] std::size_t last_index() const noexcept { return last_; }

 private:
  std::size_t first_;
  std::size_t last_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line);
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SinkUnavailable : public Error {
 public:
  SinkUnavailable(const std::string& message, int attempts, int last_status);
  [[nodiscard]] int attempts() const noexcept { return attempts_; }
  [[nodiscard]] int last_status() const noexcept { return last_status_; }
  [[nodiscard]] static constexpr bool retriable() noexcept { return true; }

 private:
  int attempts_;
  int last_status_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  [[nodiscard]] const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

}  // namespace intent_router
