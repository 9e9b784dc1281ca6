#include "intent_router/dispatch.hpp"

#include <cmath>
#include <ctime>
#include <fstream>
#include <random>
#include <set>
#include <thread>

#include <httplib.h>

#include "http_util.hpp"
#include "intent_router/error.hpp"

namespace intent_router {

namespace {

constexpr std::pair<ActionVerb, std::string_view> kVerbNames[] = {
    {ActionVerb::kDeploy, "deploy"},
    {ActionVerb::kModify, "modify"},
    {ActionVerb::kAssure, "assure"},
    {ActionVerb::kReport, "report"},
    {ActionVerb::kFeasibilityCheck, "feasibility_check"},
    {ActionVerb::kScheduleNotification, "schedule_notification"},
};

DeliveryReceipt receipt_for(const ActionRequest& r, std::string_view sink, int attempts, std::size_t bytes) {
  DeliveryReceipt out;
  out.correlation_id = r.correlation_id;
  out.sink = std::string(sink);
  out.attempts = attempts;
  out.bytes = bytes;
  out.delivered_at = std::chrono::system_clock::now();
  return out;
}

std::mutex& mutex_for(const std::filesystem::path& path) {
  static std::mutex registry_mutex;
  static std::map<std::string, std::unique_ptr<std::mutex>> registry;
  const std::lock_guard lock(registry_mutex);
  auto& slot = registry[std::filesystem::absolute(path).lexically_normal().string()];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

}  // namespace

std::string_view to_string(ActionVerb verb) noexcept {
  for (const auto& [v, name] : kVerbNames) {
    if (v == verb) return name;
  }
  return "unknown";
}

std::optional<ActionVerb> parse_action_verb(std::string_view s) noexcept {
  for (const auto& [v, name] : kVerbNames) {
    if (name == s) return v;
  }
  return std::nullopt;
}

ActionRegistry::ActionRegistry(std::map<std::string, ActionVerb> entries) {
  std::vector<std::string> problems;
  std::map<ActionVerb, std::string> owner;
  for (auto& [route, verb] : entries) {
    if (route.empty()) problems.emplace_back("empty route name in action registry");
    if (route == kNoneRoute) problems.emplace_back("NONE route cannot carry an action");
    auto [it, fresh] = owner.emplace(verb, route);
    if (!fresh) {
      problems.push_back("action '" + std::string(to_string(verb)) + "' mapped by both '" + it->second + "' and '" +
                         route + "'");
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  entries_.insert(entries.begin(), entries.end());
}

ActionRegistry ActionRegistry::builtin() {
  return ActionRegistry({
      {"Deployment Intent", ActionVerb::kDeploy},
      {"Modification Intent", ActionVerb::kModify},
      {"Performance Assurance Intent", ActionVerb::kAssure},
      {"Intent Report Request", ActionVerb::kReport},
      {"Intent Feasibility Check", ActionVerb::kFeasibilityCheck},
      {"Regular Notification Request", ActionVerb::kScheduleNotification},
  });
}

ActionRegistry ActionRegistry::from_routes(std::span<const Route> routes) {
  std::map<std::string, ActionVerb> entries;
  std::vector<std::string> problems;
  for (const auto& r : routes) {
    if (r.action.empty()) {
      problems.push_back("route '" + r.name + "' has no action");
    } else if (auto verb = parse_action_verb(r.action)) {
      entries.emplace(r.name, *verb);
    } else {
      problems.push_back("route '" + r.name + "' has unknown action '" + r.action + "'");
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return ActionRegistry(std::move(entries));
}

std::optional<ActionVerb> ActionRegistry::find(std::string_view route) const {
  auto it = entries_.find(route);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ActionRegistry::check_covers(const Router& router) const {
  std::string missing;
  for (const auto& r : router.routes()) {
    if (!find(r.name)) missing += (missing.empty() ? "'" : ", '") + r.name + "'";
  }
  if (!missing.empty()) throw Error(ErrorCode::kUnmappedRoute, "no action for route(s) " + missing);
}

DispatchResult dispatch(const RoutingDecision& decision, const ActionRegistry& registry) {
  if (decision.is_none()) {
    NoAction none;
    none.original_text = decision.text;
    none.best_score = decision.score;
    double best = -1.0;
    for (const auto& [name, score] : decision.per_route_scores) {
      if (score > best) {
        best = score;
        none.nearest_route = name;
      }
    }
    return none;
  }
  const auto verb = registry.find(*decision.route);
  if (!verb) throw Error(ErrorCode::kUnmappedRoute, "no action for route '" + *decision.route + "'");
  ActionRequest r;
  r.intent_type = *decision.route;
  r.action = *verb;
  r.original_text = decision.text;
  r.decision_score = decision.score;
  r.issued_at = std::chrono::system_clock::now();
  r.correlation_id = new_correlation_id();
  return r;
}

std::string format_rfc3339(std::chrono::system_clock::time_point t) {
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(t.time_since_epoch()).count();
  auto secs = static_cast<std::time_t>(micros / 1000000);
  auto frac = micros % 1000000;
  if (frac < 0) {
    frac += 1000000;
    --secs;
  }
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[40];
  const auto n = std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  std::snprintf(buf + n, sizeof buf - n, ".%06lldZ", static_cast<long long>(frac));
  return buf;
}

std::string new_correlation_id() {
  thread_local std::mt19937_64 engine{[] {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }()};
  std::uint64_t hi = engine();
  std::uint64_t lo = engine();
  hi = (hi & 0xffffffffffff0fffULL) | 0x0000000000004000ULL;  // version 4
  lo = (lo & 0x3fffffffffffffffULL) | 0x8000000000000000ULL;  // RFC 4122 variant
  char buf[37];
  std::snprintf(buf, sizeof buf, "%08llx-%04llx-%04llx-%04llx-%012llx",
                static_cast<unsigned long long>(hi >> 32), static_cast<unsigned long long>((hi >> 16) & 0xffff),
                static_cast<unsigned long long>(hi & 0xffff), static_cast<unsigned long long>(lo >> 48),
                static_cast<unsigned long long>(lo & 0xffffffffffffULL));
  return buf;
}

bool is_valid_utf8(std::string_view s) noexcept {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xe0) == 0xc0) {
      len = 2;
      cp = c & 0x1f;
    } else if ((c & 0xf0) == 0xe0) {
      len = 3;
      cp = c & 0x0f;
    } else if ((c & 0xf8) == 0xf0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xc0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3f);
    }
    // overlong, surrogate, out of range
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000)) return false;
    if ((cp >= 0xd800 && cp <= 0xdfff) || cp > 0x10ffff) return false;
    i += len;
  }
  return true;
}

nlohmann::ordered_json to_json(const ActionRequest& r) {
  if (!std::isfinite(r.decision_score)) {
    throw Error(ErrorCode::kSerialization, "decision_score is not finite");
  }
  for (const auto* field : {&r.intent_type, &r.original_text, &r.correlation_id}) {
    if (!is_valid_utf8(*field)) throw Error(ErrorCode::kSerialization, "action request holds invalid UTF-8");
  }
  nlohmann::ordered_json j;
  j["intent_type"] = r.intent_type;
  j["action"] = std::string(to_string(r.action));
  j["original_text"] = r.original_text;
  j["decision_score"] = r.decision_score;
  j["issued_at"] = format_rfc3339(r.issued_at);
  j["correlation_id"] = r.correlation_id;
  return j;
}

std::string serialize(const ActionRequest& r) { return to_json(r).dump(); }

DeliveryReceipt StreamSink::emit(const ActionRequest& request) {
  const std::string line = serialize(request) + "\n";
  const std::lock_guard lock(mutex_);
  out_ << line;
  out_.flush();
  if (!out_) throw SinkUnavailable("stream sink write failed", 1, 0);
  return receipt_for(request, kind(), 1, line.size());
}

FileSink::FileSink(std::filesystem::path path) : path_(std::move(path)), mutex_(&mutex_for(path_)) {
  if (path_.empty()) throw ConfigError({"file sink path is empty"});
}

DeliveryReceipt FileSink::emit(const ActionRequest& request) {
  const std::string line = serialize(request) + "\n";
  const std::lock_guard lock(*mutex_);
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out || !(out << line) || !out.flush()) {
    throw SinkUnavailable("cannot append to " + path_.string(), 1, 0);
  }
  return receipt_for(request, kind(), 1, line.size());
}

HttpSink::HttpSink(HttpSinkConfig config) : config_(std::move(config)) {
  std::vector<std::string> problems;
  if (config_.url.empty()) problems.emplace_back("http sink url is empty");
  if (config_.max_attempts < 1) problems.emplace_back("http sink max_attempts must be >= 1");
  if (config_.timeout.count() <= 0) problems.emplace_back("http sink timeout must be positive");
  if (!problems.empty()) throw ConfigError(std::move(problems));
  (void)detail::parse_url(config_.url);
}

DeliveryReceipt HttpSink::emit(const ActionRequest& request) {
  const std::string body = serialize(request);
  const auto url = detail::parse_url(config_.url);
  const std::string path = url.base_path.empty() ? "/" : url.base_path;
  auto client = detail::make_client(url, config_.timeout);
  auto backoff = config_.backoff;
  int last_status = 0;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    auto res = client->Post(path, body, "application/json");
    if (res) {
      last_status = res->status;
      if (res->status >= 200 && res->status < 300) {
        auto receipt = receipt_for(request, kind(), attempt, body.size());
        receipt.http_status = res->status;
        return receipt;
      }
      const bool transient = res->status >= 500 || res->status == 408 || res->status == 429;
      if (!transient) throw SinkUnavailable("http sink rejected request with " + std::to_string(res->status), attempt, res->status);
    }
    if (attempt < config_.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw SinkUnavailable("http sink " + config_.url + " unavailable (last status " + std::to_string(last_status) + ")",
                        config_.max_attempts, last_status);
}

}  // namespace intent_router
