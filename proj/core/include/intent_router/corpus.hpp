#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "intent_router/labeled_prompt.hpp"
#include "intent_router/router.hpp"

namespace intent_router {

// The six built-in intent routes with their standard example as the
// first (base) utterance and all thresholds at the default.
std::vector<Route> builtin_routes();
std::vector<std::string> builtin_route_names();

// (a, b, c): seed prompts, variability prompts, paraphrased prompts per route.
struct UtteranceSpec {
  int seeds = 0;
  int variability = 0;
  int paraphrase = 0;

  void validate() const;  // ConfigError unless 0 <= b <= a and 0 <= c <= a
  [[nodiscard]] int total() const noexcept { return seeds + variability + paraphrase; }
  [[nodiscard]] std::string label() const;  // "(a,b,c)"
  bool operator==(const UtteranceSpec&) const = default;
};

nlohmann::ordered_json to_json(const UtteranceSpec& spec);
UtteranceSpec utterance_spec_from_json(const nlohmann::json& j);

class Corpus {
 public:
  Corpus() = default;
  // Validates labels against `known_labels` (NONE is always accepted) and
  // resolves provenance of every derived prompt to its seed.
  explicit Corpus(std::vector<LabeledPrompt> prompts,
                  std::span<const std::string> known_labels = {});

  [[nodiscard]] std::span<const LabeledPrompt> prompts() const noexcept { return prompts_; }
  [[nodiscard]] std::size_t size() const noexcept { return prompts_.size(); }
  // Derived prompt index -> seed prompt index.
  [[nodiscard]] const std::map<std::size_t, std::size_t>& provenance() const noexcept { return provenance_; }

  [[nodiscard]] std::vector<std::size_t> indices_of(std::string_view label, Variant variant) const;
  // Derived prompts of a seed, by kind, in corpus order.
  [[nodiscard]] std::vector<std::size_t> derived_from(std::size_t seed_index, Variant kind) const;
  [[nodiscard]] std::vector<LabeledPrompt> seeds() const;
  [[nodiscard]] std::map<std::string, std::size_t> count_by_label(Variant variant) const;

  bool operator==(const Corpus& other) const { return prompts_ == other.prompts_; }

 private:
  friend Corpus parse_corpus(std::string_view, std::span<const std::string>);
  struct Issue {
    std::size_t index;
    std::string message;
  };
  Corpus(std::vector<LabeledPrompt> prompts, std::span<const std::string> known_labels,
         std::optional<Issue>& issue);
  std::optional<Issue> index_prompts(std::span<const std::string> known_labels);

  std::vector<LabeledPrompt> prompts_;
  std::map<std::size_t, std::size_t> provenance_;
  std::multimap<std::size_t, std::size_t> derived_;
};

// JSON Lines, one LabeledPrompt per line. Labels default to the built-in route names.
Corpus load_corpus(const std::filesystem::path& path,
                   std::span<const std::string> known_labels = {});
Corpus parse_corpus(std::string_view jsonl, std::span<const std::string> known_labels = {});
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
std::string serialize_corpus(const Corpus& corpus);

struct ComposedUtterances {
  std::vector<std::string> utterances;  // base utterance first
  std::vector<std::size_t> consumed;    // corpus indices used as utterances
};

// Seeded selection of `spec.seeds` seeds for `route` (nested across spec sizes
// for a fixed seed), followed by the variability versions of the first
// `spec.variability` and paraphrase versions of the first `spec.paraphrase`.
ComposedUtterances compose_utterances(const Corpus& corpus, const UtteranceSpec& spec,
                                      std::string_view route, std::uint64_t seed);

}  // namespace intent_router
