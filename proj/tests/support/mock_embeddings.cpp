#include "mock_embeddings.hpp"

#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "oracles.hpp"

struct MockEmbeddingServer::Impl {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  mutable std::mutex mutex;
  std::string authorization;
};

MockEmbeddingServer::MockEmbeddingServer(std::size_t dim) : impl_(std::make_unique<Impl>()), dim_(dim) {
  impl_->server.Post("/v1/embeddings", [this](const httplib::Request& req, httplib::Response& res) {
    ++requests_;
    {
      const std::lock_guard lock(impl_->mutex);
      impl_->authorization = req.get_header_value("Authorization");
    }
    const Mode mode = mode_.load();
    if (mode == Mode::kUnauthorized) {
      res.status = 401;
      res.set_content(R"({"error":"bad key"})", "application/json");
      return;
    }
    if (mode == Mode::kServerError) {
      res.status = 500;
      return;
    }
    if (mode == Mode::kMalformed) {
      res.set_content("{\"data\": [", "application/json");
      return;
    }
    const auto body = nlohmann::json::parse(req.body);
    const auto inputs = body.at("input").get<std::vector<std::string>>();
    texts_ += inputs.size();
    nlohmann::json data = nlohmann::json::array();
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (mode == Mode::kShortBatch && i + 1 == inputs.size()) break;
      auto v = oracle::reference_embedding(inputs[i], dim_);
      // Unnormalized on the wire; the client must normalize.
      for (double& x : v) x *= 3.0;
      if (mode == Mode::kDimensionMismatch && i == 1) v.pop_back();
      data.push_back({{"object", "embedding"}, {"index", i}, {"embedding", v}});
    }
    if (mode == Mode::kReversedIndex) std::reverse(data.begin(), data.end());
    res.set_content(nlohmann::json{{"object", "list"}, {"data", data}, {"model", body.at("model")}}.dump(),
                    "application/json");
  });
  impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
  impl_->thread = std::thread([impl = impl_.get()] { impl->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

MockEmbeddingServer::~MockEmbeddingServer() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string MockEmbeddingServer::endpoint() const { return "http://127.0.0.1:" + std::to_string(impl_->port); }

std::string MockEmbeddingServer::last_authorization() const {
  const std::lock_guard lock(impl_->mutex);
  return impl_->authorization;
}
