#include <gtest/gtest.h>

#include <mutex>
#include <sstream>

#include "intent_router/corpus.hpp"
#include "intent_router/mock_chat.hpp"
#include "intent_router/variants.hpp"

using namespace intent_router;

namespace {

const std::string kDeploy = "Deployment Intent";

LabeledPrompt seed(std::string text, std::string label = kDeploy, std::string id = "d-1") {
  LabeledPrompt p;
  p.text = std::move(text);
  p.label = std::move(label);
  p.source_id = std::move(id);
  return p;
}

class FixedGenerator : public VariantGenerator {
 public:
  explicit FixedGenerator(std::vector<std::string> out) : out_(std::move(out)) {}
  Origin origin() const noexcept override { return Origin::kRule; }
  std::vector<std::string> transform(std::span<const std::string>, Variant) const override { return out_; }

 private:
  std::vector<std::string> out_;
};

}  // namespace

TEST(Instructions, VerbatimText) {
  EXPECT_EQ(instruction_for(Variant::kVariability),
            "I need to introduce linguistic variability to the following prompts. Adjust the wording and phrasing "
            "as required.");
  EXPECT_EQ(instruction_for(Variant::kParaphrase),
            "I need to paraphrase the following prompts. Make sure to keep the same semantic meaning but change "
            "sentence structure and wording accordingly.");
  EXPECT_THROW((void)instruction_for(Variant::kSeed), Error);
}

TEST(Numbered, FormatAndParse) {
  const std::vector<std::string> seeds = {"first one", "second"};
  EXPECT_EQ(LlmVariantGenerator::format_numbered(seeds), "1. first one\n2. second\n");
  const auto parsed = LlmVariantGenerator::parse_numbered("Sure!\n1) \"alpha\"\n**2.** beta \n\n4: delta", 4);
  EXPECT_EQ(parsed, (std::vector<std::string>{"alpha", "beta", "", "delta"}));
  EXPECT_EQ(LlmVariantGenerator::parse_numbered("9. out of range", 2), (std::vector<std::string>{"", ""}));
}

TEST(Validate, Reasons) {
  const auto s = seed("Deploy a network in Ottawa.");
  EXPECT_EQ(validate_variant(s, ""), "empty output");
  EXPECT_EQ(validate_variant(s, "   "), "empty output");
  EXPECT_EQ(validate_variant(s, "Deploy a network in Ottawa."), "identical to seed");
  EXPECT_EQ(validate_variant(s, "Paint the fence green."), "label keywords absent");
  EXPECT_EQ(validate_variant(s, "Roll out a network in Ottawa."), "");
}

TEST(GenerateVariants, CollectsEveryIssue) {
  const std::vector<LabeledPrompt> seeds = {seed("Deploy a slice in Paris.", kDeploy, "d-1"),
                                            seed("Deploy a slice in Rome.", kDeploy, "d-2"),
                                            seed("Deploy a slice in Oslo.", kDeploy, "d-3")};
  const FixedGenerator gen({"", "Launch a slice in Rome.", "Deploy a slice in Oslo."});
  try {
    (void)generate_variants(seeds, Variant::kVariability, gen);
    FAIL();
  } catch (const ValidationFailure& e) {
    ASSERT_EQ(e.issues().size(), 2u);
    EXPECT_EQ(e.issues()[0].index, 0u);
    EXPECT_EQ(e.issues()[1].index, 2u);
    ASSERT_EQ(e.derived().size(), 3u);
    EXPECT_EQ(e.derived()[1].text, "Launch a slice in Rome.");
    EXPECT_EQ(e.code(), ErrorCode::kValidationFailure);
  }
}

TEST(GenerateVariants, CarriesLabelIdAndOrigin) {
  const std::vector<LabeledPrompt> seeds = {seed("Deploy a slice in Paris.", kDeploy, "d-9")};
  const auto out = generate_variants(seeds, Variant::kParaphrase, FixedGenerator({"In Paris, roll out a slice."}));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].label, kDeploy);
  EXPECT_EQ(out[0].source_id, "d-9");
  EXPECT_EQ(out[0].variant, Variant::kParaphrase);
  EXPECT_EQ(out[0].origin, Origin::kRule);
}

TEST(RuleBased, EverySynthesizedSeedYieldsValidVariants) {
  const auto seeds = synthesize_seed_prompts(7, 30);
  const RuleBasedVariantGenerator gen;
  for (auto kind : {Variant::kVariability, Variant::kParaphrase}) {
    const auto out = generate_variants(seeds, kind, gen);
    ASSERT_EQ(out.size(), seeds.size());
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NE(out[i].text, seeds[i].text);
  }
}

TEST(RuleBased, Examples) {
  EXPECT_EQ(RuleBasedVariantGenerator::vary("Deploy a network in Ottawa."), "Roll out a network in Ottawa.");
  const auto p = RuleBasedVariantGenerator::paraphrase("Notify me of the status of net-4 every hour.");
  EXPECT_NE(p, "Notify me of the status of net-4 every hour.");
  EXPECT_NE(p.find("net-4"), std::string::npos);
}

TEST(LlmGenerator, SendsInstructionAndParsesNumberedReply) {
  std::mutex m;
  std::vector<std::vector<ChatMessage>> seen;
  MockChatServer server(
      [&](const std::vector<ChatMessage>& messages) {
        {
          const std::lock_guard lock(m);
          seen.push_back(messages);
        }
        // Echo each numbered line with a prefix word.
        std::string out;
        std::istringstream in(messages.back().content);
        for (std::string line; std::getline(in, line);) {
          const auto dot = line.find(". ");
          out += line.substr(0, dot) + ". Please " + line.substr(dot + 2) + "\n";
        }
        return out;
      },
      std::chrono::milliseconds(0));
  const ChatClient client({server.endpoint(), "mock", std::chrono::milliseconds(5000)});
  const LlmVariantGenerator gen(client, 2);
  const std::vector<std::string> seeds = {"deploy a", "deploy b", "deploy c"};
  const auto out = gen.transform(seeds, Variant::kParaphrase);
  EXPECT_EQ(out, (std::vector<std::string>{"Please deploy a", "Please deploy b", "Please deploy c"}));
  ASSERT_EQ(seen.size(), 2u);
  EXPECT_EQ(seen[0].front().role, "system");
  EXPECT_EQ(seen[0].front().content, kParaphraseInstruction);
  EXPECT_EQ(seen[0].back().content, "1. deploy a\n2. deploy b\n");
  EXPECT_EQ(seen[1].back().content, "1. deploy c\n");
}
