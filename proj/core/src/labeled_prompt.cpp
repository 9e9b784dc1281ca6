#include "intent_router/labeled_prompt.hpp"

namespace intent_router {

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::kBase: return "base";
    case Variant::kSeed: return "seed";
    case Variant::kVariability: return "variability";
    case Variant::kParaphrase: return "paraphrase";
  }
  return "seed";
}

std::optional<Variant> parse_variant(std::string_view s) noexcept {
  if (s == "base") return Variant::kBase;
  if (s == "seed") return Variant::kSeed;
  if (s == "variability") return Variant::kVariability;
  if (s == "paraphrase") return Variant::kParaphrase;
  return std::nullopt;
}

std::string_view to_string(Origin o) noexcept {
  switch (o) {
    case Origin::kManual: return "manual";
    case Origin::kLlm: return "llm";
    case Origin::kRule: return "rule";
  }
  return "manual";
}

std::optional<Origin> parse_origin(std::string_view s) noexcept {
  if (s == "manual") return Origin::kManual;
  if (s == "llm") return Origin::kLlm;
  if (s == "rule") return Origin::kRule;
  return std::nullopt;
}

nlohmann::ordered_json to_json(const LabeledPrompt& p) {
  nlohmann::ordered_json j;
  j["text"] = p.text;
  j["label"] = p.label;
  j["variant"] = to_string(p.variant);
  j["source_id"] = p.source_id;
  j["fold"] = p.fold ? nlohmann::ordered_json(*p.fold) : nlohmann::ordered_json(nullptr);
  j["origin"] = to_string(p.origin);
  return j;
}

}  // namespace intent_router
