#include "intent_router/mock_chat.hpp"

#include <cmath>
#include <thread>

#include <httplib.h>

#include "intent_router/error.hpp"

namespace intent_router {

struct MockChatServer::Impl {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<std::size_t> requests{0};
  bool stopped = false;
};

MockChatServer::MockChatServer(ChatResponder responder, std::chrono::milliseconds delay)
    : impl_(std::make_unique<Impl>()) {
  impl_->server.Post(R"(.*/v1/chat/completions)", [this, responder = std::move(responder), delay](
                                                       const httplib::Request& req, httplib::Response& res) {
    ++impl_->requests;
    std::vector<ChatMessage> messages;
    try {
      const auto body = nlohmann::json::parse(req.body);
      for (const auto& m : body.at("messages")) {
        messages.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
      }
    } catch (const nlohmann::json::exception& e) {
      res.status = 400;
      res.set_content(std::string("{\"error\":\"") + "bad request" + "\"}", "application/json");
      return;
    }
    if (delay.count() > 0) std::this_thread::sleep_for(delay);
    nlohmann::ordered_json reply;
    reply["id"] = "mock-" + std::to_string(impl_->requests.load());
    reply["object"] = "chat.completion";
    reply["choices"] = nlohmann::ordered_json::array(
        {nlohmann::ordered_json{{"index", 0},
                                {"message", {{"role", "assistant"}, {"content", responder(messages)}}},
                                {"finish_reason", "stop"}}});
    res.set_content(reply.dump(), "application/json");
  });
  impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
  if (impl_->port <= 0) throw Error(ErrorCode::kIo, "mock chat server could not bind");
  impl_->thread = std::thread([impl = impl_.get()] { impl->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

MockChatServer::~MockChatServer() { stop(); }

void MockChatServer::stop() {
  if (!impl_ || impl_->stopped) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
  impl_->stopped = true;
}

std::string MockChatServer::endpoint() const { return "http://127.0.0.1:" + std::to_string(impl_->port); }

std::size_t MockChatServer::request_count() const noexcept { return impl_->requests.load(); }

bool HallucinationSchedule::corrupts(std::size_t request_index) const noexcept {
  if (rate <= 0.0 || request_index < onset) return false;
  const auto k = static_cast<double>(request_index - onset);
  return std::floor((k + 1.0) * rate) > std::floor(k * rate);
}

std::map<std::string, std::vector<std::string>> default_near_misses() {
  return {
      {"Deployment Intent", {"Deploy Intent", "Network Deployment"}},
      {"Modification Intent", {"Modify Intent", "Network Modification"}},
      {"Performance Assurance Intent", {"Performance Intent", "Intent Assurance"}},
      {"Intent Report Request", {"Report Intent", "Request Report"}},
      {"Intent Feasibility Check", {"Feasibility Intent", "Capacity Check"}},
      {"Regular Notification Request", {"Notification Intent", "Status Notification"}},
  };
}

IntentOracleResponder::IntentOracleResponder(std::map<std::string, std::string> answers,
                                             HallucinationSchedule schedule,
                                             std::map<std::string, std::vector<std::string>> near_misses)
    : answers_(std::make_shared<const std::map<std::string, std::string>>(std::move(answers))),
      near_misses_(std::make_shared<const std::map<std::string, std::vector<std::string>>>(std::move(near_misses))),
      schedule_(schedule),
      state_(std::make_shared<State>()) {}

std::string IntentOracleResponder::operator()(const std::vector<ChatMessage>& messages) {
  const std::size_t index = state_->requests++;
  std::string user;
  for (const auto& m : messages) {
    if (m.role == "user") user = m.content;
  }
  auto it = answers_->find(user);
  const std::string truth = it == answers_->end() ? std::string("Unknown") : it->second;
  if (!schedule_.corrupts(index)) return truth;
  auto nm = near_misses_->find(truth);
  if (nm == near_misses_->end() || nm->second.empty()) return "General Intent";
  const std::size_t n = state_->corrupted++;
  return nm->second[n % nm->second.size()];
}

}  // namespace intent_router
