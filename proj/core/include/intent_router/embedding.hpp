#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace intent_router {

inline constexpr std::size_t kMinReferenceDim = 8;
// Word limit applied to MiniLM-style encoders when none is configured.
inline constexpr std::size_t kMiniLmWordLimit = 256;

// Unit-norm dense embedding. Construction goes through normalize(), so every
// instance has finite components and an L2 norm of 1 within rounding.
class EmbeddingVector {
 public:
  // Rejects empty, all-zero and non-finite input.
  static EmbeddingVector normalize(std::vector<double> raw);

  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::size_t dim() const noexcept { return values_.size(); }
  [[nodiscard]] double norm() const noexcept;

  // Cosine similarity; both operands are unit vectors so this is the dot product.
  [[nodiscard]] double dot(const EmbeddingVector& other) const;

  bool operator==(const EmbeddingVector&) const = default;

 private:
  explicit EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {}
  std::vector<double> values_;
};

enum class EncoderKind { kReference, kRemote };

struct EncoderDescriptor {
  EncoderKind kind = EncoderKind::kReference;
  std::string name = "reference";
  std::size_t dim = 512;
  std::optional<std::size_t> word_limit;
  std::optional<std::string> endpoint;
  std::optional<std::string> model;
  std::chrono::milliseconds timeout{30000};
  // Remote only: directory holding the append-only embedding cache.
  std::optional<std::string> cache_dir;
  std::size_t batch_size = 64;

  // Throws ConfigError listing every violated constraint.
  void validate() const;

  bool operator==(const EncoderDescriptor&) const = default;
};

nlohmann::ordered_json to_json(const EncoderDescriptor& desc);
// Applies the MiniLM word-limit default when "word_limit" is absent and the
// model name (or "minilm_like": true) identifies a MiniLM-style encoder.
EncoderDescriptor encoder_from_json(const nlohmann::json& j);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

// First `limit` whitespace-delimited tokens joined by single spaces.
std::string truncate_words(std::string_view text, std::size_t limit);

// Lowercases ASCII letters and maps every byte outside [a-z0-9 ] to a space.
std::string normalize_reference_text(std::string_view text);

// Hashed word unigrams plus '#'-padded character trigrams, FNV-1a bucketed and
// signed by bit 63, then L2-normalized.
EmbeddingVector reference_encode(std::string_view text, std::size_t dim);

class Encoder {
 public:
  virtual ~Encoder() = default;

  [[nodiscard]] virtual const EncoderDescriptor& descriptor() const noexcept = 0;

  // One vector per text, in input order. Applies the descriptor's word limit.
  [[nodiscard]] std::vector<EmbeddingVector> encode_batch(std::span<const std::string> texts) const;
  [[nodiscard]] EmbeddingVector encode(std::string_view text) const;

 protected:
  [[nodiscard]] virtual std::vector<EmbeddingVector> encode_prepared(
      std::span<const std::string> texts) const = 0;
};

class ReferenceEncoder final : public Encoder {
 public:
  explicit ReferenceEncoder(EncoderDescriptor desc);
  [[nodiscard]] const EncoderDescriptor& descriptor() const noexcept override { return desc_; }

 protected:
  [[nodiscard]] std::vector<EmbeddingVector> encode_prepared(
      std::span<const std::string> texts) const override;

 private:
  EncoderDescriptor desc_;
};

std::shared_ptr<const Encoder> make_encoder(const EncoderDescriptor& desc);

}  // namespace intent_router
