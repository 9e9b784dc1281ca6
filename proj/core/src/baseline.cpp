#include "intent_router/baseline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

#include <httplib.h>

#include "http_util.hpp"
#include "intent_router/corpus.hpp"
#include "intent_router/error.hpp"

namespace intent_router {

ChatClient::ChatClient(ChatClientConfig config) : config_(std::move(config)) {
  std::vector<std::string> problems;
  if (config_.endpoint.empty()) problems.emplace_back("chat endpoint is empty");
  if (config_.model.empty()) problems.emplace_back("chat model is empty");
  if (config_.temperature < 0.0) problems.emplace_back("chat temperature must be >= 0");
  if (config_.timeout.count() <= 0) problems.emplace_back("chat timeout must be positive");
  if (!problems.empty()) throw ConfigError(std::move(problems));
  (void)detail::parse_url(config_.endpoint);
}

std::string ChatClient::complete(std::span<const ChatMessage> messages,
                                 std::optional<double> temperature) const {
  const auto url = detail::parse_url(config_.endpoint);
  auto client = detail::make_client(url, config_.timeout);

  nlohmann::ordered_json body;
  body["model"] = config_.model;
  body["temperature"] = temperature.value_or(config_.temperature);
  body["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : messages) {
    body["messages"].push_back(nlohmann::ordered_json{{"role", m.role}, {"content", m.content}});
  }

  httplib::Headers headers;
  const std::string key = detail::env_or_empty(kLlmKeyEnv);
  if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);

  ++requests_;
  auto res = client->Post(url.base_path + "/v1/chat/completions", headers, body.dump(), "application/json");
  if (!res) {
    throw RemoteError(ErrorCode::kTransport, "chat request failed: " + httplib::to_string(res.error()), 0, 1);
  }
  if (res->status == 401 || res->status == 403) {
    throw RemoteError(ErrorCode::kAuth, "chat credentials rejected (HTTP " + std::to_string(res->status) + ")", 0, 1);
  }
  if (res->status < 200 || res->status >= 300) {
    throw RemoteError(ErrorCode::kTransport, "chat HTTP " + std::to_string(res->status), 0, 1);
  }
  std::string content;
  try {
    const auto j = nlohmann::json::parse(res->body);
    const auto& message = j.at("choices").at(0).at("message");
    if (message.contains("content") && message.at("content").is_string()) {
      content = message.at("content").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw RemoteError(ErrorCode::kProtocol, std::string("malformed chat response: ") + e.what(), 0, 1);
  }
  if (content.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw Error(ErrorCode::kEmptyResponse, "chat completion has no content");
  }
  return content;
}

std::string ChatClient::complete(std::string_view system, std::string_view user,
                                 std::optional<double> temperature) const {
  const std::vector<ChatMessage> messages{{"system", std::string(system)}, {"user", std::string(user)}};
  return complete(messages, temperature);
}

std::string normalize_label(std::string_view raw) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : raw) {
    if (std::isalnum(c)) {
      if (pending_space && !out.empty()) out += ' ';
      pending_space = false;
      out += static_cast<char>(std::tolower(c));
    } else {
      pending_space = true;
    }
  }
  return out;
}

LabelMatch match_label(std::string_view raw, std::span<const std::string> labels) {
  const std::string norm = normalize_label(raw);
  if (norm.empty()) return {std::nullopt, true};
  for (const auto& label : labels) {
    if (normalize_label(label) == norm) return {label, false};
  }
  // Containment on word boundaries, in either direction, must be unambiguous.
  const std::string padded_raw = " " + norm + " ";
  std::optional<std::string> found;
  std::size_t hits = 0;
  for (const auto& label : labels) {
    const std::string padded_label = " " + normalize_label(label) + " ";
    if (padded_raw.find(padded_label) != std::string::npos ||
        padded_label.find(padded_raw) != std::string::npos) {
      found = label;
      ++hits;
    }
  }
  if (hits == 1) return {found, false};
  return {std::nullopt, true};
}

std::string classification_system_prompt(std::span<const std::string> labels) {
  const auto routes = builtin_routes();
  std::string out =
      "You classify user requests for 5G core network management and orchestration by intent. "
      "The intent categories are:\n";
  for (const auto& label : labels) {
    out += "- " + label;
    for (const auto& r : routes) {
      if (r.name == label) out += ": for example \"" + r.utterances.front() + "\"";
    }
    out += "\n";
  }
  out += "Respond with exactly one category name.";
  return out;
}

BaselineOutcome classify_by_prompt(const ChatClient& client, std::string_view text,
                                   std::span<const std::string> labels) {
  if (text.empty()) throw Error(ErrorCode::kEmptyInput, "text to classify is empty");
  if (labels.empty()) throw Error(ErrorCode::kInvalidArgument, "no labels to classify into");
  const std::string system = classification_system_prompt(labels);
  BaselineOutcome out;
  const auto start = std::chrono::steady_clock::now();
  out.raw = client.complete(system, text, 0.0);
  out.elapsed = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start);
  const auto match = match_label(out.raw, labels);
  out.normalized_label = match.label;
  out.hallucinated = match.hallucinated;
  return out;
}

LatencySummary summarize_latencies(std::vector<double> micros) {
  LatencySummary s;
  s.count = micros.size();
  if (micros.empty()) return s;
  std::sort(micros.begin(), micros.end());
  const std::size_t n = micros.size();
  s.median_us = n % 2 == 1 ? micros[n / 2] : 0.5 * (micros[n / 2 - 1] + micros[n / 2]);
  // Nearest-rank percentile.
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  s.p95_us = micros[std::max<std::size_t>(rank, 1) - 1];
  s.mean_us = std::accumulate(micros.begin(), micros.end(), 0.0) / static_cast<double>(n);
  return s;
}

double ComparisonReport::router_accuracy() const noexcept {
  return n_samples == 0 ? 0.0 : static_cast<double>(router_correct) / static_cast<double>(n_samples);
}

double ComparisonReport::llm_accuracy() const noexcept {
  return n_samples == 0 ? 0.0 : static_cast<double>(llm_correct) / static_cast<double>(n_samples);
}

namespace {

nlohmann::ordered_json to_json(const LatencySummary& s) {
  return nlohmann::ordered_json{{"count", s.count},
                                {"median_us", s.median_us},
                                {"p95_us", s.p95_us},
                                {"mean_us", s.mean_us}};
}

}  // namespace

nlohmann::ordered_json to_json(const ComparisonReport& r) {
  nlohmann::ordered_json j;
  j["n_samples"] = r.n_samples;
  j["router_accuracy"] = r.router_accuracy();
  j["llm_accuracy"] = r.llm_accuracy();
  j["llm_hallucinated"] = r.llm_hallucinated;
  j["router_latency"] = to_json(r.router);
  j["llm_latency"] = to_json(r.llm);
  j["ratio"] = r.ratio;
  j["expected_ratio"] = r.expected_ratio;
  j["meets_expectation"] = r.meets_expectation;
  j["llm_failures"] = nlohmann::ordered_json::array();
  for (const auto& f : r.llm_failures) {
    j["llm_failures"].push_back(nlohmann::ordered_json{{"index", f.index}, {"message", f.message}});
  }
  return j;
}

ComparisonReport compare_latency(const Router& router, const ChatClient& client,
                                 std::span<const LabeledPrompt> samples, const CompareOptions& options) {
  const auto labels = router.route_names();
  return compare_latency([&router](std::size_t) -> const Router& { return router; }, client, samples, labels,
                         options);
}

ComparisonReport compare_latency(const std::function<const Router&(std::size_t)>& router_for,
                                 const ChatClient& client, std::span<const LabeledPrompt> samples,
                                 std::span<const std::string> labels, const CompareOptions& options) {
  if (samples.size() < options.min_samples) {
    throw Error(ErrorCode::kInvalidArgument, "latency comparison needs at least " +
                                                 std::to_string(options.min_samples) + " samples, got " +
                                                 std::to_string(samples.size()));
  }
  ComparisonReport report;
  report.n_samples = samples.size();
  report.expected_ratio = options.expected_ratio;

  std::vector<double> router_us;
  router_us.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto decision = router_for(i).route_query(samples[i].text);
    router_us.push_back(static_cast<double>(decision.elapsed.count()));
    if (decision.route_name() == samples[i].label) ++report.router_correct;
  }

  std::vector<std::optional<BaselineOutcome>> outcomes(samples.size());
  std::vector<std::optional<std::string>> failures(samples.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < samples.size(); i = next++) {
      try {
        outcomes[i] = classify_by_prompt(client, samples[i].text, labels);
      } catch (const Error& e) {
        failures[i] = e.what();
      }
    }
  };
  {
    const std::size_t n_threads = std::clamp<std::size_t>(options.max_in_flight, 1, samples.size());
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  std::vector<double> llm_us;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (failures[i]) {
      report.llm_failures.push_back({i, *failures[i]});
      continue;
    }
    const auto& o = *outcomes[i];
    llm_us.push_back(static_cast<double>(o.elapsed.count()));
    if (o.hallucinated) ++report.llm_hallucinated;
    if (o.normalized_label && *o.normalized_label == samples[i].label) ++report.llm_correct;
  }

  report.router = summarize_latencies(std::move(router_us));
  report.llm = summarize_latencies(std::move(llm_us));
  if (report.llm.count > 0) {
    report.ratio = report.llm.median_us / std::max(report.router.median_us, 1.0);
  }
  report.meets_expectation = report.llm.count > 0 && report.ratio >= options.expected_ratio;
  return report;
}

}  // namespace intent_router
