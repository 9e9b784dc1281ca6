#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "intent_router/baseline.hpp"
#include "intent_router/corpus.hpp"
#include "intent_router/embedding.hpp"
#include "intent_router/mock_chat.hpp"
#include "intent_router/tuning.hpp"

namespace intent_router {

enum class ExperimentKind { kUtterance, kDiversity, kEncoder, kComparison, kQuantization };

std::string_view to_string(ExperimentKind kind) noexcept;
std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) noexcept;

// Spec sweeps run by the utterance and diversity families.
std::vector<UtteranceSpec> default_specs(ExperimentKind kind);

struct TuningConfig {
  bool enabled = true;
  double grid_step = 0.01;
  int max_passes = 10;
};

struct MockChatConfig {
  std::chrono::milliseconds delay{500};
  HallucinationSchedule hallucination;
};

// A chat endpoint is either remote (endpoint + model) or a local mock.
struct LlmEndpointConfig {
  std::string name;
  std::optional<ChatClientConfig> remote;
  std::optional<MockChatConfig> mock;
};

struct ComparisonConfig {
  double expected_ratio = 50.0;
  std::size_t max_in_flight = 4;
  std::size_t min_samples = 20;
  std::size_t max_samples = 0;  // 0 keeps every evaluation sample
  double hallucination_rate = 0.3;
  std::size_t hallucination_onset = 0;
};

struct ExperimentConfig {
  std::filesystem::path corpus_path;
  std::vector<EncoderDescriptor> encoders{EncoderDescriptor{}};
  UtteranceSpec utterance_spec{5, 5, 5};
  std::vector<UtteranceSpec> specs;  // empty selects default_specs()
  int k_folds = 5;
  std::uint64_t rng_seed = 42;
  std::size_t top_k = kDefaultTopK;
  TuningConfig tuning;
  MockChatConfig mock;
  ComparisonConfig comparison;
  std::vector<LlmEndpointConfig> llm_endpoints;
  std::filesystem::path output_dir = "results";
  bool allow_remote = false;

  [[nodiscard]] const EncoderDescriptor& encoder() const { return encoders.at(0); }
  [[nodiscard]] std::vector<UtteranceSpec> specs_for(ExperimentKind kind) const;
  // Throws ConfigError listing every problem for running `kind`; touches no network.
  void validate(ExperimentKind kind) const;
};

// Named preset with default parameters over the given corpus.
ExperimentConfig experiment_preset(ExperimentKind kind, std::filesystem::path corpus_path);

// Relative paths resolve against `base_dir`. Unknown keys are config errors.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const ExperimentConfig& config);

struct CellTiming {
  double encode_ms = 0.0;
  double tune_ms = 0.0;
  double total_ms = 0.0;
};

struct ExperimentResult {
  std::string encoder;
  UtteranceSpec spec;
  int k_folds = 0;
  std::uint64_t rng_seed = 0;
  std::size_t utterances_per_route = 0;  // including the base utterance
  EvaluationReport pre_train;
  EvaluationReport pre_test;
  EvaluationReport post_train;
  EvaluationReport post_test;
  std::vector<ThresholdSet> fold_thresholds;
  CellTiming timing;
};

nlohmann::ordered_json to_json(const ExperimentResult& r);

struct ComparisonResult {
  std::string endpoint;
  std::string condition;  // "clean" or "hallucinating" for the comparison family
  ComparisonReport report;
};

nlohmann::ordered_json to_json(const ComparisonResult& r);

struct ExperimentRun {
  ExperimentKind kind = ExperimentKind::kUtterance;
  ExperimentConfig config;
  std::vector<ExperimentResult> results;
  std::vector<ComparisonResult> comparisons;
  double elapsed_ms = 0.0;
};

nlohmann::ordered_json to_json(const ExperimentRun& run);

// Shared evaluation protocol: seed prompts form the evaluation pool, split
// once into stratified folds; prompts consumed as utterances by the largest
// spec of the sweep are left out of every evaluation so all specs see the
// same samples.
class ExperimentData {
 public:
  ExperimentData(Corpus corpus, std::span<const UtteranceSpec> specs, int k_folds, std::uint64_t seed);

  [[nodiscard]] const Corpus& corpus() const noexcept { return corpus_; }
  [[nodiscard]] const std::vector<LabeledPrompt>& pool() const noexcept { return pool_; }
  [[nodiscard]] const Folds& folds() const noexcept { return folds_; }
  // Pool indices evaluated, sorted.
  [[nodiscard]] const std::vector<std::size_t>& evaluated() const noexcept { return evaluated_; }
  // Fold of each pool index.
  [[nodiscard]] const std::vector<int>& fold_of() const noexcept { return fold_of_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

 private:
  Corpus corpus_;
  std::vector<LabeledPrompt> pool_;
  std::vector<std::size_t> corpus_index_;
  Folds folds_;
  std::vector<int> fold_of_;
  std::vector<std::size_t> evaluated_;
  std::uint64_t seed_;
};

// Router over the built-in routes with utterances composed for `spec`.
Router compose_router(const Corpus& corpus, const UtteranceSpec& spec, std::shared_ptr<const Encoder> encoder,
                      std::uint64_t seed, std::size_t top_k = kDefaultTopK);

// k-fold pre/post tuning evaluation of one spec.
ExperimentResult run_cell(const ExperimentData& data, const UtteranceSpec& spec,
                          std::shared_ptr<const Encoder> encoder, const ExperimentConfig& config);

std::vector<ExperimentResult> run_utterance_experiment(const ExperimentConfig& config);
std::vector<ExperimentResult> run_diversity_experiment(const ExperimentConfig& config);
// Utterance sweep repeated per encoder, tagged with the encoder name.
std::vector<ExperimentResult> run_encoder_experiment(const ExperimentConfig& config);
// Router vs prompting baseline on a clean and a hallucinating mock endpoint.
std::vector<ComparisonResult> run_comparison_experiment(const ExperimentConfig& config);
// Comparison repeated per configured chat endpoint.
std::vector<ComparisonResult> run_quantization_sweep(const ExperimentConfig& config);

ExperimentRun run_experiment(ExperimentKind kind, const ExperimentConfig& config);

// Text and CSV renderings of a run.
std::string render_table(const ExperimentRun& run);
std::string render_csv(const ExperimentRun& run);

// Writes <kind>.json, <kind>.csv and <kind>.txt into `dir`; returns the paths.
std::vector<std::filesystem::path> write_reports(const ExperimentRun& run, const std::filesystem::path& dir);

}  // namespace intent_router
