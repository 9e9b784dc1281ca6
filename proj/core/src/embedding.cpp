#include "intent_router/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "intent_router/error.hpp"
#include "intent_router/remote_encoder.hpp"

namespace intent_router {

EmbeddingVector EmbeddingVector::normalize(std::vector<double> raw) {
  if (raw.empty()) throw Error(ErrorCode::kInvalidDim, "embedding has zero dimensions");
  double sum_sq = 0.0;
  for (double v : raw) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "embedding has non-finite component");
    sum_sq += v * v;
  }
  if (sum_sq == 0.0) throw Error(ErrorCode::kEmptyInput, "cannot normalize a zero vector");
  const double norm = std::sqrt(sum_sq);
  for (double& v : raw) v /= norm;
  return EmbeddingVector(std::move(raw));
}

double EmbeddingVector::norm() const noexcept {
  double sum_sq = 0.0;
  for (double v : values_) sum_sq += v * v;
  return std::sqrt(sum_sq);
}

double EmbeddingVector::dot(const EmbeddingVector& other) const {
  if (other.dim() != dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "dimension " + std::to_string(dim()) + " vs " +
                                                   std::to_string(other.dim()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) acc += values_[i] * other.values_[i];
  return acc;
}

void EncoderDescriptor::validate() const {
  std::vector<std::string> problems;
  if (name.empty()) problems.emplace_back("encoder name is empty");
  if (word_limit && *word_limit == 0) problems.emplace_back("encoder word_limit must be positive");
  if (kind == EncoderKind::kReference) {
    if (dim < kMinReferenceDim) {
      problems.push_back("reference encoder dim must be >= " + std::to_string(kMinReferenceDim));
    }
  } else {
    if (!endpoint || endpoint->empty()) problems.emplace_back("remote encoder requires endpoint");
    if (!model || model->empty()) problems.emplace_back("remote encoder requires model");
    if (batch_size == 0) problems.emplace_back("remote encoder batch_size must be positive");
  }
  if (timeout.count() <= 0) problems.emplace_back("encoder timeout must be positive");
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

nlohmann::ordered_json to_json(const EncoderDescriptor& desc) {
  nlohmann::ordered_json j;
  j["kind"] = desc.kind == EncoderKind::kReference ? "reference" : "remote";
  j["name"] = desc.name;
  if (desc.kind == EncoderKind::kReference) j["dim"] = desc.dim;
  if (desc.word_limit) j["word_limit"] = *desc.word_limit;
  if (desc.endpoint) j["endpoint"] = *desc.endpoint;
  if (desc.model) j["model"] = *desc.model;
  j["timeout_ms"] = desc.timeout.count();
  if (desc.cache_dir) j["cache_dir"] = *desc.cache_dir;
  if (desc.kind == EncoderKind::kRemote) j["batch_size"] = desc.batch_size;
  return j;
}

namespace {

bool looks_minilm(const EncoderDescriptor& desc) {
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
  };
  return lower(desc.model.value_or("")).find("minilm") != std::string::npos ||
         lower(desc.name).find("minilm") != std::string::npos;
}

}  // namespace

EncoderDescriptor encoder_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError({"encoder must be a JSON object"});
  std::vector<std::string> problems;
  EncoderDescriptor desc;
  try {
    const std::string kind = j.value("kind", "reference");
    if (kind == "reference") {
      desc.kind = EncoderKind::kReference;
    } else if (kind == "remote") {
      desc.kind = EncoderKind::kRemote;
    } else {
      problems.push_back("unknown encoder kind '" + kind + "'");
    }
    desc.name = j.value("name", desc.kind == EncoderKind::kReference ? "reference" : "remote");
    desc.dim = j.value("dim", desc.dim);
    if (j.contains("word_limit") && !j.at("word_limit").is_null()) {
      desc.word_limit = j.at("word_limit").get<std::size_t>();
    }
    if (j.contains("endpoint")) desc.endpoint = j.at("endpoint").get<std::string>();
    if (j.contains("model")) desc.model = j.at("model").get<std::string>();
    desc.timeout = std::chrono::milliseconds(j.value("timeout_ms", desc.timeout.count()));
    if (j.contains("cache_dir")) desc.cache_dir = j.at("cache_dir").get<std::string>();
    desc.batch_size = j.value("batch_size", desc.batch_size);
  } catch (const nlohmann::json::exception& e) {
    problems.push_back(std::string("encoder field has wrong type: ") + e.what());
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  const bool has_limit_key = j.contains("word_limit");
  if (!has_limit_key && (j.value("minilm_like", false) || looks_minilm(desc))) {
    desc.word_limit = kMiniLmWordLimit;
  }
  desc.validate();
  return desc;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string truncate_words(std::string_view text, std::size_t limit) {
  std::istringstream in{std::string(text)};
  std::string word;
  std::string out;
  std::size_t count = 0;
  while (count < limit && in >> word) {
    if (count > 0) out += ' ';
    out += word;
    ++count;
  }
  return out;
}

std::string normalize_reference_text(std::string_view text) {
  std::string out(text.size(), ' ');
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (c >= 'A' && c <= 'Z') {
      out[i] = static_cast<char>(c - 'A' + 'a');
    } else if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      out[i] = static_cast<char>(c);
    }
  }
  return out;
}

EmbeddingVector reference_encode(std::string_view text, std::size_t dim) {
  if (dim < kMinReferenceDim) {
    throw Error(ErrorCode::kInvalidDim, "reference dim " + std::to_string(dim) + " < " +
                                            std::to_string(kMinReferenceDim));
  }
  const std::string normalized = normalize_reference_text(text);
  std::vector<std::int64_t> acc(dim, 0);
  bool any = false;
  auto add_feature = [&](std::string_view feature) {
    const std::uint64_t h = fnv1a64(feature);
    acc[h % dim] += (h >> 63) == 0 ? 1 : -1;
    any = true;
  };

  std::istringstream in(normalized);
  std::string word;
  std::string padded;
  while (in >> word) {
    add_feature(word);
    padded = "#" + word + "#";
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
      add_feature(std::string_view(padded).substr(i, 3));
    }
  }
  if (!any) throw Error(ErrorCode::kEmptyInput, "text has no features after normalization");

  std::vector<double> raw(acc.begin(), acc.end());
  // Opposite-signed features can cancel to a zero vector; report it as empty input.
  return EmbeddingVector::normalize(std::move(raw));
}

std::vector<EmbeddingVector> Encoder::encode_batch(std::span<const std::string> texts) const {
  const auto& limit = descriptor().word_limit;
  if (!limit) return encode_prepared(texts);
  std::vector<std::string> truncated;
  truncated.reserve(texts.size());
  for (const auto& t : texts) truncated.push_back(truncate_words(t, *limit));
  return encode_prepared(truncated);
}

EmbeddingVector Encoder::encode(std::string_view text) const {
  const std::string owned(text);
  auto out = encode_batch(std::span<const std::string>(&owned, 1));
  return std::move(out.front());
}

ReferenceEncoder::ReferenceEncoder(EncoderDescriptor desc) : desc_(std::move(desc)) {
  if (desc_.kind != EncoderKind::kReference) {
    throw Error(ErrorCode::kInvalidArgument, "ReferenceEncoder needs a reference descriptor");
  }
  desc_.validate();
}

std::vector<EmbeddingVector> ReferenceEncoder::encode_prepared(
    std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(reference_encode(t, desc_.dim));
  return out;
}

std::shared_ptr<const Encoder> make_encoder(const EncoderDescriptor& desc) {
  desc.validate();
  if (desc.kind == EncoderKind::kReference) return std::make_shared<ReferenceEncoder>(desc);
  return std::make_shared<RemoteEncoder>(desc);
}

}  // namespace intent_router
