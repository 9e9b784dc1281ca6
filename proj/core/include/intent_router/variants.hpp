#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "intent_router/baseline.hpp"
#include "intent_router/corpus.hpp"
#include "intent_router/error.hpp"
#include "intent_router/labeled_prompt.hpp"

namespace intent_router {

// Instructions sent verbatim as the system message ahead of the seed prompts.
inline constexpr std::string_view kVariabilityInstruction =
    "I need to introduce linguistic variability to the following prompts. Adjust the wording and "
    "phrasing as required.";
inline constexpr std::string_view kParaphraseInstruction =
    "I need to paraphrase the following prompts. Make sure to keep the same semantic meaning but "
    "change sentence structure and wording accordingly.";

std::string_view instruction_for(Variant kind);

class VariantGenerator {
 public:
  virtual ~VariantGenerator() = default;
  [[nodiscard]] virtual Origin origin() const noexcept = 0;
  // One output per seed, in order; an empty string marks a missing output.
  [[nodiscard]] virtual std::vector<std::string> transform(std::span<const std::string> seeds,
                                                           Variant kind) const = 0;
};

// Sends the instruction followed by a numbered list of seeds and parses the
// numbered list that comes back.
class LlmVariantGenerator final : public VariantGenerator {
 public:
  explicit LlmVariantGenerator(const ChatClient& client, std::size_t batch_size = 10);
  [[nodiscard]] Origin origin() const noexcept override { return Origin::kLlm; }
  [[nodiscard]] std::vector<std::string> transform(std::span<const std::string> seeds,
                                                   Variant kind) const override;

  static std::string format_numbered(std::span<const std::string> seeds);
  static std::vector<std::string> parse_numbered(std::string_view reply, std::size_t expected);

 private:
  const ChatClient& client_;
  std::size_t batch_size_;
};

// Offline fallback: synonym substitution for variability; clause reordering
// plus substitution for paraphrase.
class RuleBasedVariantGenerator final : public VariantGenerator {
 public:
  [[nodiscard]] Origin origin() const noexcept override { return Origin::kRule; }
  [[nodiscard]] std::vector<std::string> transform(std::span<const std::string> seeds,
                                                   Variant kind) const override;

  [[nodiscard]] static std::string vary(std::string_view seed);
  [[nodiscard]] static std::string paraphrase(std::string_view seed);
};

// Case-insensitive keyword stems that signal each built-in intent.
std::vector<std::string> label_keywords(std::string_view label);

struct VariantIssue {
  std::size_t index;
  std::string reason;
};

class ValidationFailure : public Error {
 public:
  ValidationFailure(std::vector<VariantIssue> issues, std::vector<LabeledPrompt> derived);

  [[nodiscard]] const std::vector<VariantIssue>& issues() const noexcept { return issues_; }
  // Every derived prompt, flagged ones included, one per seed.
  [[nodiscard]] const std::vector<LabeledPrompt>& derived() const noexcept { return derived_; }

 private:
  std::vector<VariantIssue> issues_;
  std::vector<LabeledPrompt> derived_;
};

// Reason a derived prompt is rejected, or empty when it is acceptable.
std::string validate_variant(const LabeledPrompt& seed, std::string_view derived);

// One derived prompt per seed with the seed's label and id. Throws
// ValidationFailure listing every rejected index.
std::vector<LabeledPrompt> generate_variants(std::span<const LabeledPrompt> seeds, Variant kind,
                                             const VariantGenerator& generator);
std::vector<LabeledPrompt> generate_variants(std::span<const LabeledPrompt> seeds, Variant kind,
                                             const ChatClient& llm);

// Seed prompts covering the location and identifier styles of real 5G core
// requests; `per_route` per built-in route, ids "<slug>-NN".
std::vector<LabeledPrompt> synthesize_seed_prompts(std::uint64_t seed, std::size_t per_route = 30);

// Seeds followed by their variability and paraphrase versions.
Corpus build_corpus(std::span<const LabeledPrompt> seeds, const VariantGenerator& generator);

}  // namespace intent_router
