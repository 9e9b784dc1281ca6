#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "intent_router/baseline.hpp"

namespace intent_router {

// Produces the assistant content for one chat request.
using ChatResponder = std::function<std::string(const std::vector<ChatMessage>& messages)>;

// Local OpenAI-compatible chat endpoint on 127.0.0.1 with a fixed service
// delay, used as a deterministic stand-in for a served LLM.
class MockChatServer {
 public:
  MockChatServer(ChatResponder responder, std::chrono::milliseconds delay);
  ~MockChatServer();

  MockChatServer(const MockChatServer&) = delete;
  MockChatServer& operator=(const MockChatServer&) = delete;

  [[nodiscard]] std::string endpoint() const;
  [[nodiscard]] std::size_t request_count() const noexcept;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Request i (0-based, counted from the first request) is corrupted when
// i >= onset and floor((i - onset + 1) * rate) > floor((i - onset) * rate),
// so exactly `rate` of the requests after onset are corrupted.
struct HallucinationSchedule {
  std::size_t onset = 0;
  double rate = 0.0;

  [[nodiscard]] bool corrupts(std::size_t request_index) const noexcept;
};

// Near-miss category names per built-in route (e.g. "Performance Intent").
// None of them match a route after label normalization.
std::map<std::string, std::vector<std::string>> default_near_misses();

// Answers with the true label of the user message (looked up in `answers`),
// replaced by a near-miss name whenever the schedule says so.
class IntentOracleResponder {
 public:
  IntentOracleResponder(std::map<std::string, std::string> answers, HallucinationSchedule schedule,
                        std::map<std::string, std::vector<std::string>> near_misses = default_near_misses());

  std::string operator()(const std::vector<ChatMessage>& messages);
  [[nodiscard]] std::size_t corrupted() const noexcept { return state_->corrupted.load(); }

 private:
  struct State {
    std::atomic<std::size_t> requests{0};
    std::atomic<std::size_t> corrupted{0};
  };
  std::shared_ptr<const std::map<std::string, std::string>> answers_;
  std::shared_ptr<const std::map<std::string, std::vector<std::string>>> near_misses_;
  HallucinationSchedule schedule_;
  std::shared_ptr<State> state_;
};

}  // namespace intent_router
