#include "intent_router/remote_encoder.hpp"

#include <algorithm>
#include <fstream>

#include <httplib.h>

#include "http_util.hpp"
#include "intent_router/error.hpp"

namespace intent_router {

namespace {

std::string cache_file_name(const std::string& encoder_name) {
  std::string out;
  for (char c : encoder_name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out + ".jsonl";
}

}  // namespace

EmbeddingCache::EmbeddingCache(std::string encoder_name, std::string model,
                               std::optional<std::filesystem::path> file)
    : encoder_name_(std::move(encoder_name)), model_(std::move(model)), file_(std::move(file)) {
  if (!file_ || !std::filesystem::exists(*file_)) return;
  std::ifstream in(*file_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      // A torn final line from an interrupted append is skipped.
      continue;
    }
    if (j.value("model", "") != model_) continue;
    auto values = j.at("embedding").get<std::vector<double>>();
    entries_.insert_or_assign(key(j.at("text").get<std::string>()),
                              EmbeddingVector::normalize(std::move(values)));
  }
}

std::string EmbeddingCache::key(const std::string& text) const {
  std::string k;
  k.reserve(encoder_name_.size() + model_.size() + text.size() + 2);
  k += encoder_name_;
  k += '\x1f';
  k += model_;
  k += '\x1f';
  k += text;
  return k;
}

std::optional<EmbeddingVector> EmbeddingCache::find(const std::string& text) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key(text));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void EmbeddingCache::insert(const std::string& text, const EmbeddingVector& vec) {
  std::lock_guard lock(mutex_);
  auto [it, inserted] = entries_.insert_or_assign(key(text), vec);
  if (!inserted || !file_) return;
  std::filesystem::create_directories(file_->parent_path());
  std::ofstream out(*file_, std::ios::app);
  nlohmann::ordered_json j;
  j["model"] = model_;
  j["text"] = text;
  j["embedding"] = std::vector<double>(vec.values().begin(), vec.values().end());
  out << j.dump() << '\n';
}

std::size_t EmbeddingCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

RemoteEncoder::RemoteEncoder(EncoderDescriptor desc)
    : desc_(std::move(desc)),
      cache_(desc_.name, desc_.model.value_or(""),
             desc_.cache_dir ? std::optional<std::filesystem::path>(
                                   std::filesystem::path(*desc_.cache_dir) / cache_file_name(desc_.name))
                             : std::nullopt) {
  if (desc_.kind != EncoderKind::kRemote) {
    throw Error(ErrorCode::kInvalidArgument, "RemoteEncoder needs a remote descriptor");
  }
  desc_.validate();
}

std::vector<EmbeddingVector> RemoteEncoder::encode_prepared(std::span<const std::string> texts) const {
  if (texts.empty()) throw Error(ErrorCode::kEmptyInput, "no texts to encode");

  std::vector<std::optional<EmbeddingVector>> results(texts.size());
  // Unique uncached texts and the first input index each came from.
  std::vector<std::string> pending;
  std::vector<std::size_t> pending_origin;
  std::unordered_map<std::string, std::size_t> pending_slot;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (auto hit = cache_.find(texts[i])) {
      results[i] = std::move(*hit);
      continue;
    }
    if (pending_slot.emplace(texts[i], pending.size()).second) {
      pending.push_back(texts[i]);
      pending_origin.push_back(i);
    }
  }

  std::size_t expected_dim = 0;
  for (std::size_t begin = 0; begin < pending.size(); begin += desc_.batch_size) {
    const std::size_t end = std::min(pending.size(), begin + desc_.batch_size);
    const std::size_t first_input = pending_origin[begin];
    const std::size_t last_input = pending_origin[end - 1] + 1;
    auto vectors = request_batch(std::span(pending).subspan(begin, end - begin), first_input, last_input);
    for (std::size_t k = 0; k < vectors.size(); ++k) {
      if (expected_dim == 0) expected_dim = vectors[k].dim();
      if (vectors[k].dim() != expected_dim) {
        throw RemoteError(ErrorCode::kProtocol, "embedding dimension changed between batches",
                          first_input, last_input);
      }
      cache_.insert(pending[begin + k], vectors[k]);
    }
  }

  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (!results[i]) {
      auto hit = cache_.find(texts[i]);
      if (!hit) throw Error(ErrorCode::kProtocol, "embedding missing after fetch");
      results[i] = std::move(*hit);
    }
    if (!out.empty() && results[i]->dim() != out.front().dim()) {
      throw RemoteError(ErrorCode::kProtocol, "cached embedding dimension mismatch", i, i + 1);
    }
    out.push_back(std::move(*results[i]));
  }
  return out;
}

std::vector<EmbeddingVector> RemoteEncoder::request_batch(std::span<const std::string> texts,
                                                          std::size_t first_index,
                                                          std::size_t last_index) const {
  const auto url = detail::parse_url(*desc_.endpoint);
  auto client = detail::make_client(url, desc_.timeout);

  nlohmann::ordered_json body;
  body["model"] = *desc_.model;
  body["input"] = std::vector<std::string>(texts.begin(), texts.end());

  httplib::Headers headers;
  const std::string key = detail::env_or_empty(kEmbedKeyEnv);
  if (!key.empty()) headers.emplace("Authorization", "Bearer " + key);

  ++requests_;
  auto res = client->Post(url.base_path + "/v1/embeddings", headers, body.dump(), "application/json");
  if (!res) {
    throw RemoteError(ErrorCode::kTransport, "request failed: " + httplib::to_string(res.error()),
                      first_index, last_index);
  }
  if (res->status == 401 || res->status == 403) {
    throw RemoteError(ErrorCode::kAuth, "credentials rejected (HTTP " + std::to_string(res->status) + ")",
                      first_index, last_index);
  }
  if (res->status < 200 || res->status >= 300) {
    throw RemoteError(ErrorCode::kTransport, "HTTP " + std::to_string(res->status), first_index,
                      last_index);
  }

  std::vector<EmbeddingVector> out;
  try {
    const auto j = nlohmann::json::parse(res->body);
    const auto& data = j.at("data");
    if (!data.is_array() || data.size() != texts.size()) {
      throw RemoteError(ErrorCode::kProtocol,
                        "expected " + std::to_string(texts.size()) + " embeddings, got " +
                            std::to_string(data.is_array() ? data.size() : 0),
                        first_index, last_index);
    }
    // Providers may reorder; honor the "index" field when present.
    std::vector<const nlohmann::json*> ordered(texts.size(), nullptr);
    for (std::size_t k = 0; k < data.size(); ++k) {
      const std::size_t slot = data[k].contains("index") ? data[k].at("index").get<std::size_t>() : k;
      if (slot >= ordered.size() || ordered[slot] != nullptr) {
        throw RemoteError(ErrorCode::kProtocol, "bad or duplicate embedding index", first_index,
                          last_index);
      }
      ordered[slot] = &data[k];
    }
    for (const auto* item : ordered) {
      auto values = item->at("embedding").get<std::vector<double>>();
      if (!out.empty() && values.size() != out.front().dim()) {
        throw RemoteError(ErrorCode::kProtocol, "dimension mismatch within batch", first_index,
                          last_index);
      }
      out.push_back(EmbeddingVector::normalize(std::move(values)));
    }
  } catch (const RemoteError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw RemoteError(ErrorCode::kProtocol, std::string("malformed response: ") + e.what(),
                      first_index, last_index);
  } catch (const Error& e) {
    throw RemoteError(ErrorCode::kProtocol, e.what(), first_index, last_index);
  }
  return out;
}

}  // namespace intent_router
