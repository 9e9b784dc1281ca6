#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "intent_router/router.hpp"

namespace intent_router {

enum class ActionVerb { kDeploy, kModify, kAssure, kReport, kFeasibilityCheck, kScheduleNotification };

std::string_view to_string(ActionVerb verb) noexcept;
std::optional<ActionVerb> parse_action_verb(std::string_view s) noexcept;

// Route name -> verb, one verb per route and no verb shared.
class ActionRegistry {
 public:
  explicit ActionRegistry(std::map<std::string, ActionVerb> entries);

  // The six built-in routes.
  static ActionRegistry builtin();
  // From each route's `action` field. ConfigError on missing or unknown verbs.
  static ActionRegistry from_routes(std::span<const Route> routes);

  [[nodiscard]] std::optional<ActionVerb> find(std::string_view route) const;
  [[nodiscard]] const std::map<std::string, ActionVerb, std::less<>>& entries() const noexcept { return entries_; }
  // Throws Error(kUnmappedRoute) naming every route of `router` without a verb.
  void check_covers(const Router& router) const;

 private:
  std::map<std::string, ActionVerb, std::less<>> entries_;
};

struct ActionRequest {
  std::string intent_type;
  ActionVerb action = ActionVerb::kDeploy;
  std::string original_text;
  double decision_score = 0.0;
  std::chrono::system_clock::time_point issued_at;
  std::string correlation_id;
};

// A NONE decision: nothing is sent, the closest route is kept for audit.
struct NoAction {
  std::string original_text;
  double best_score = 0.0;
  std::optional<std::string> nearest_route;
};

using DispatchResult = std::variant<ActionRequest, NoAction>;

DispatchResult dispatch(const RoutingDecision& decision, const ActionRegistry& registry);

// UTC with microseconds, e.g. 2024-05-01T12:00:00.000000Z.
std::string format_rfc3339(std::chrono::system_clock::time_point t);
// Random version-4 UUID, lowercase.
std::string new_correlation_id();
bool is_valid_utf8(std::string_view s) noexcept;

// Field order: intent_type, action, original_text, decision_score, issued_at,
// correlation_id. Throws Error(kSerialization) on a non-finite score or
// invalid UTF-8.
nlohmann::ordered_json to_json(const ActionRequest& r);
// One line of compact JSON without the trailing newline.
std::string serialize(const ActionRequest& r);

struct DeliveryReceipt {
  std::string correlation_id;
  std::string sink;
  int attempts = 0;
  std::optional<int> http_status;
  std::size_t bytes = 0;
  std::chrono::system_clock::time_point delivered_at;
};

class ActionSink {
 public:
  virtual ~ActionSink() = default;
  [[nodiscard]] virtual std::string_view kind() const noexcept = 0;
  virtual DeliveryReceipt emit(const ActionRequest& request) = 0;
};

// One JSON line per request; std::cout for the stdout sink.
class StreamSink final : public ActionSink {
 public:
  explicit StreamSink(std::ostream& out) : out_(out) {}
  [[nodiscard]] std::string_view kind() const noexcept override { return "stdout"; }
  DeliveryReceipt emit(const ActionRequest& request) override;

 private:
  std::ostream& out_;
  std::mutex mutex_;
};

// Appends JSON lines; writers of the same path in one process are serialized.
class FileSink final : public ActionSink {
 public:
  explicit FileSink(std::filesystem::path path);
  [[nodiscard]] std::string_view kind() const noexcept override { return "file"; }
  [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }
  DeliveryReceipt emit(const ActionRequest& request) override;

 private:
  std::filesystem::path path_;
  std::mutex* mutex_;
};

struct HttpSinkConfig {
  std::string url;
  std::chrono::milliseconds timeout{5000};
  int max_attempts = 3;
  std::chrono::milliseconds backoff{100};  // doubled after each failed attempt
};

// POSTs the request as application/json. 5xx, 408, 429 and transport failures
// are retried; exhausting attempts (or any other non-2xx) raises SinkUnavailable.
class HttpSink final : public ActionSink {
 public:
  explicit HttpSink(HttpSinkConfig config);
  [[nodiscard]] std::string_view kind() const noexcept override { return "http"; }
  DeliveryReceipt emit(const ActionRequest& request) override;

 private:
  HttpSinkConfig config_;
};

}  // namespace intent_router
