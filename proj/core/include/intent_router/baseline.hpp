#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "intent_router/labeled_prompt.hpp"
#include "intent_router/router.hpp"

namespace intent_router {

inline constexpr const char* kLlmKeyEnv = "INTENT_ROUTER_LLM_KEY";

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatClientConfig {
  std::string endpoint;
  std::string model;
  std::chrono::milliseconds timeout{60000};
  double temperature = 0.0;
};

// OpenAI-compatible chat completions client (POST {endpoint}/v1/chat/completions).
class ChatClient {
 public:
  explicit ChatClient(ChatClientConfig config);

  [[nodiscard]] const ChatClientConfig& config() const noexcept { return config_; }

  // Returns choices[0].message.content. Throws RemoteError (transport, auth,
  // protocol) or Error(kEmptyResponse).
  [[nodiscard]] std::string complete(std::span<const ChatMessage> messages,
                                     std::optional<double> temperature = std::nullopt) const;
  [[nodiscard]] std::string complete(std::string_view system, std::string_view user,
                                     std::optional<double> temperature = std::nullopt) const;

  [[nodiscard]] std::size_t request_count() const noexcept { return requests_.load(); }

 private:
  ChatClientConfig config_;
  mutable std::atomic<std::size_t> requests_{0};
};

// Lowercase, punctuation to spaces, whitespace collapsed and trimmed.
std::string normalize_label(std::string_view raw);

struct LabelMatch {
  std::optional<std::string> label;
  bool hallucinated = false;
};

// Exact match on normalized text, then unambiguous containment either way;
// anything else is a hallucinated category.
LabelMatch match_label(std::string_view raw, std::span<const std::string> labels);

// System message listing every category (with its standard example when it is
// a built-in route) and asking for exactly one category name.
std::string classification_system_prompt(std::span<const std::string> labels);

struct BaselineOutcome {
  std::string raw;
  std::optional<std::string> normalized_label;  // nullopt is NONE
  bool hallucinated = false;
  std::chrono::microseconds elapsed{0};
};

BaselineOutcome classify_by_prompt(const ChatClient& client, std::string_view text,
                                   std::span<const std::string> labels);

struct LatencySummary {
  std::size_t count = 0;
  double median_us = 0.0;
  double p95_us = 0.0;
  double mean_us = 0.0;
};

LatencySummary summarize_latencies(std::vector<double> micros);

struct SampleFailure {
  std::size_t index;
  std::string message;
};

struct ComparisonReport {
  std::size_t n_samples = 0;
  LatencySummary router;
  LatencySummary llm;
  double ratio = 0.0;  // llm median / router median
  double expected_ratio = 0.0;
  bool meets_expectation = false;
  std::size_t router_correct = 0;
  std::size_t llm_correct = 0;
  std::size_t llm_hallucinated = 0;
  std::vector<SampleFailure> llm_failures;

  [[nodiscard]] double router_accuracy() const noexcept;
  [[nodiscard]] double llm_accuracy() const noexcept;
};

nlohmann::ordered_json to_json(const ComparisonReport& r);

struct CompareOptions {
  double expected_ratio = 50.0;
  std::size_t max_in_flight = 4;
  std::size_t min_samples = 20;
};

ComparisonReport compare_latency(const Router& router, const ChatClient& client,
                                 std::span<const LabeledPrompt> samples, const CompareOptions& options = {});

// Variant where sample i is routed by router_for(i), e.g. the fold-tuned router
// that never saw that sample.
ComparisonReport compare_latency(const std::function<const Router&(std::size_t)>& router_for,
                                 const ChatClient& client, std::span<const LabeledPrompt> samples,
                                 std::span<const std::string> labels, const CompareOptions& options = {});

}  // namespace intent_router
