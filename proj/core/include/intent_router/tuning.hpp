#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "intent_router/labeled_prompt.hpp"
#include "intent_router/router.hpp"

namespace intent_router {

struct EvaluationReport {
  double accuracy = 0.0;
  std::size_t n_samples = 0;
  std::vector<std::string> labels;                    // route names, then "NONE"
  std::vector<std::vector<std::size_t>> confusion;    // rows true, columns predicted
  std::vector<double> per_fold;

  [[nodiscard]] double mean_fold_accuracy() const;
  bool operator==(const EvaluationReport&) const = default;
};

nlohmann::ordered_json to_json(const EvaluationReport& r);
EvaluationReport evaluation_report_from_json(const nlohmann::json& j);

// Sums confusion matrices; per_fold lists each part's accuracy in order.
EvaluationReport pool_reports(std::span<const EvaluationReport> parts);

using Folds = std::vector<std::vector<std::size_t>>;

// Stratified split: each label's indices are shuffled with `seed` and dealt
// round-robin, continuing the fold cursor from one label to the next.
Folds kfold_split(std::span<const LabeledPrompt> corpus, int k, std::uint64_t seed);

// Per-route aggregate scores of a fixed prompt set, computed once so repeated
// evaluations and threshold sweeps need no re-encoding.
struct ScoreTable {
  std::vector<std::string> route_names;
  std::vector<std::vector<double>> scores;  // one row per prompt
  std::vector<int> truth;                   // route index, or -1 for NONE

  [[nodiscard]] std::size_t rows() const noexcept { return scores.size(); }
};

ScoreTable score_prompts(const Router& router, std::span<const LabeledPrompt> prompts);

// Routes every selected row under the given thresholds. Empty `rows` means all rows.
EvaluationReport evaluate_scores(const ScoreTable& table, std::span<const double> thresholds,
                                 std::span<const std::size_t> rows = {});

EvaluationReport evaluate(const Router& router, std::span<const LabeledPrompt> test_set);

struct TuningOptions {
  double grid_step = 0.01;
  int max_passes = 10;
  double initial_threshold = kDefaultThreshold;
};

// Coordinate ascent on training accuracy. Each route's candidates are the grid
// {0, step, ..., 1}, the midpoints between consecutive distinct training scores
// of that route, and its current value; ties go to the smallest threshold.
// Two-route problems finish with an exact search over the joint candidate grid.
std::vector<double> fit_thresholds(const ScoreTable& table, std::span<const std::size_t> rows,
                                   const TuningOptions& options);

ThresholdSet fit_thresholds(const Router& router, std::span<const LabeledPrompt> train_set,
                            const TuningOptions& options = {});

}  // namespace intent_router
