#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace intent_router {

enum class Variant { kBase, kSeed, kVariability, kParaphrase };

std::string_view to_string(Variant v) noexcept;
std::optional<Variant> parse_variant(std::string_view s) noexcept;

// Which generator produced a derived prompt.
enum class Origin { kManual, kLlm, kRule };

std::string_view to_string(Origin o) noexcept;
std::optional<Origin> parse_origin(std::string_view s) noexcept;

struct LabeledPrompt {
  std::string text;
  std::string label;  // route name or "NONE"
  Variant variant = Variant::kSeed;
  // Seeds carry their own id here; derived prompts carry the id of their seed.
  std::string source_id;
  std::optional<int> fold;
  Origin origin = Origin::kManual;

  bool operator==(const LabeledPrompt&) const = default;
};

// Field order: text, label, variant, source_id, fold, origin.
nlohmann::ordered_json to_json(const LabeledPrompt& p);

}  // namespace intent_router
