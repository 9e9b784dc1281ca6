#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "intent_router/embedding.hpp"

namespace intent_router {

inline constexpr const char* kEmbedKeyEnv = "INTENT_ROUTER_EMBED_KEY";

// Embedding cache keyed by (encoder name, model, exact text). With a backing
// file it loads existing entries on open and appends new ones, one JSON
// object per line.
class EmbeddingCache {
 public:
  EmbeddingCache(std::string encoder_name, std::string model,
                 std::optional<std::filesystem::path> file = std::nullopt);

  [[nodiscard]] std::optional<EmbeddingVector> find(const std::string& text) const;
  void insert(const std::string& text, const EmbeddingVector& vec);
  [[nodiscard]] std::size_t size() const;

 private:
  std::string key(const std::string& text) const;

  std::string encoder_name_;
  std::string model_;
  std::optional<std::filesystem::path> file_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, EmbeddingVector> entries_;
};

// Client for OpenAI-compatible embedding services (POST {endpoint}/v1/embeddings).
class RemoteEncoder final : public Encoder {
 public:
  explicit RemoteEncoder(EncoderDescriptor desc);

  [[nodiscard]] const EncoderDescriptor& descriptor() const noexcept override { return desc_; }
  // Number of HTTP requests sent so far.
  [[nodiscard]] std::size_t request_count() const noexcept { return requests_.load(); }
  [[nodiscard]] const EmbeddingCache& cache() const noexcept { return cache_; }

 protected:
  [[nodiscard]] std::vector<EmbeddingVector> encode_prepared(
      std::span<const std::string> texts) const override;

 private:
  std::vector<EmbeddingVector> request_batch(std::span<const std::string> texts,
                                             std::size_t first_index,
                                             std::size_t last_index) const;

  EncoderDescriptor desc_;
  mutable EmbeddingCache cache_;
  mutable std::atomic<std::size_t> requests_{0};
};

}  // namespace intent_router
