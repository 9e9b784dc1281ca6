#include "intent_router/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "intent_router/error.hpp"
#include "intent_router/rng.hpp"

namespace intent_router {

double EvaluationReport::mean_fold_accuracy() const {
  if (per_fold.empty()) return accuracy;
  return std::accumulate(per_fold.begin(), per_fold.end(), 0.0) / static_cast<double>(per_fold.size());
}

nlohmann::ordered_json to_json(const EvaluationReport& r) {
  nlohmann::ordered_json j;
  j["accuracy"] = r.accuracy;
  j["n_samples"] = r.n_samples;
  j["labels"] = r.labels;
  j["confusion"] = r.confusion;
  j["per_fold"] = r.per_fold;
  return j;
}

EvaluationReport evaluation_report_from_json(const nlohmann::json& j) {
  EvaluationReport r;
  try {
    r.accuracy = j.at("accuracy").get<double>();
    r.n_samples = j.at("n_samples").get<std::size_t>();
    r.labels = j.at("labels").get<std::vector<std::string>>();
    r.confusion = j.at("confusion").get<std::vector<std::vector<std::size_t>>>();
    r.per_fold = j.at("per_fold").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("evaluation report: ") + e.what());
  }
  return r;
}

namespace {

std::size_t trace(const std::vector<std::vector<std::size_t>>& m) {
  std::size_t t = 0;
  for (std::size_t i = 0; i < m.size(); ++i) t += m[i][i];
  return t;
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

EvaluationReport pool_reports(std::span<const EvaluationReport> parts) {
  if (parts.empty()) throw Error(ErrorCode::kInvalidArgument, "no reports to pool");
  EvaluationReport out;
  out.labels = parts.front().labels;
  out.confusion.assign(out.labels.size(), std::vector<std::size_t>(out.labels.size(), 0));
  for (const auto& p : parts) {
    if (p.labels != out.labels) throw Error(ErrorCode::kInvalidArgument, "label sets differ");
    for (std::size_t i = 0; i < p.confusion.size(); ++i) {
      for (std::size_t j = 0; j < p.confusion[i].size(); ++j) out.confusion[i][j] += p.confusion[i][j];
    }
    out.n_samples += p.n_samples;
    out.per_fold.push_back(p.accuracy);
  }
  out.accuracy = ratio(trace(out.confusion), out.n_samples);
  return out;
}

Folds kfold_split(std::span<const LabeledPrompt> corpus, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "k-fold needs k >= 2");
  std::vector<std::string> label_order;
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto [it, inserted] = by_label.try_emplace(corpus[i].label);
    if (inserted) label_order.push_back(corpus[i].label);
    it->second.push_back(i);
  }
  for (const auto& label : label_order) {
    if (by_label[label].size() < static_cast<std::size_t>(k)) {
      throw Error(ErrorCode::kInsufficientSamples,
                  label + " has " + std::to_string(by_label[label].size()) + " samples, k = " +
                      std::to_string(k));
    }
  }
  Folds folds(static_cast<std::size_t>(k));
  std::size_t cursor = 0;
  for (const auto& label : label_order) {
    auto& indices = by_label[label];
    DeterministicRng rng(derive_seed(seed, label));
    rng.shuffle(std::span(indices));
    for (std::size_t idx : indices) {
      folds[cursor % folds.size()].push_back(idx);
      ++cursor;
    }
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

ScoreTable score_prompts(const Router& router, std::span<const LabeledPrompt> prompts) {
  ScoreTable table;
  table.route_names = router.route_names();
  std::vector<std::string> texts;
  texts.reserve(prompts.size());
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    const auto& p = prompts[i];
    if (p.label == kNoneRoute) {
      table.truth.push_back(-1);
    } else if (auto idx = router.route_index(p.label)) {
      table.truth.push_back(static_cast<int>(*idx));
    } else {
      throw Error(ErrorCode::kInvalidArgument, "sample " + std::to_string(i) + ": unknown label " + p.label);
    }
    if (p.text.empty()) throw Error(ErrorCode::kEmptyInput, "sample " + std::to_string(i) + ": empty text");
    texts.push_back(p.text);
  }
  if (texts.empty()) return table;

  std::vector<EmbeddingVector> vectors;
  try {
    vectors = router.encoder().encode_batch(texts);
  } catch (const Error&) {
    // Locate the failing sample so the caller can report it.
    for (std::size_t i = 0; i < texts.size(); ++i) {
      try {
        (void)router.encoder().encode(texts[i]);
      } catch (const Error& e) {
        throw Error(e.code(), "sample " + std::to_string(i) + ": " + e.what());
      }
    }
    throw;
  }
  table.scores.reserve(vectors.size());
  for (const auto& v : vectors) table.scores.push_back(router.score_routes(v));
  return table;
}

namespace {

std::vector<std::size_t> all_rows(const ScoreTable& table, std::span<const std::size_t> rows) {
  if (!rows.empty()) return {rows.begin(), rows.end()};
  std::vector<std::size_t> out(table.rows());
  std::iota(out.begin(), out.end(), 0);
  return out;
}

}  // namespace

EvaluationReport evaluate_scores(const ScoreTable& table, std::span<const double> thresholds,
                                 std::span<const std::size_t> rows) {
  const std::size_t n_routes = table.route_names.size();
  if (thresholds.size() != n_routes) {
    throw Error(ErrorCode::kInvalidArgument, "threshold count differs from route count");
  }
  EvaluationReport r;
  r.labels = table.route_names;
  r.labels.emplace_back(kNoneRoute);
  r.confusion.assign(n_routes + 1, std::vector<std::size_t>(n_routes + 1, 0));
  for (std::size_t row : all_rows(table, rows)) {
    const auto pick = select_route(table.scores.at(row), thresholds);
    const std::size_t predicted = pick ? *pick : n_routes;
    const int t = table.truth.at(row);
    const std::size_t truth = t < 0 ? n_routes : static_cast<std::size_t>(t);
    ++r.confusion[truth][predicted];
    ++r.n_samples;
  }
  r.accuracy = ratio(trace(r.confusion), r.n_samples);
  return r;
}

EvaluationReport evaluate(const Router& router, std::span<const LabeledPrompt> test_set) {
  if (test_set.empty()) throw Error(ErrorCode::kEmptyInput, "test set is empty");
  const auto table = score_prompts(router, test_set);
  return evaluate_scores(table, router.thresholds());
}

namespace {

// Accuracy over `rows` as a function of one route's threshold, others fixed.
class CoordinateObjective {
 public:
  CoordinateObjective(const ScoreTable& table, std::span<const std::size_t> rows,
                      std::span<const double> thresholds, std::size_t route)
      : table_(table), rows_(rows), route_(route) {
    best_other_.reserve(rows.size());
    for (std::size_t row : rows) {
      const auto& s = table.scores[row];
      int best = -1;
      for (std::size_t j = 0; j < s.size(); ++j) {
        if (j == route || !meets_threshold(s[j], thresholds[j])) continue;
        if (best < 0 || s[j] > s[static_cast<std::size_t>(best)]) best = static_cast<int>(j);
      }
      best_other_.push_back(best);
    }
  }

  [[nodiscard]] std::size_t correct(double threshold) const {
    std::size_t hits = 0;
    for (std::size_t k = 0; k < rows_.size(); ++k) {
      const auto& s = table_.scores[rows_[k]];
      const int other = best_other_[k];
      int predicted = other;
      if (meets_threshold(s[route_], threshold)) {
        const bool wins = other < 0 || s[route_] > s[static_cast<std::size_t>(other)] ||
                          (s[route_] == s[static_cast<std::size_t>(other)] &&
                           route_ < static_cast<std::size_t>(other));
        if (wins) predicted = static_cast<int>(route_);
      }
      if (predicted == table_.truth[rows_[k]]) ++hits;
    }
    return hits;
  }

 private:
  const ScoreTable& table_;
  std::span<const std::size_t> rows_;
  std::size_t route_;
  std::vector<int> best_other_;
};

std::vector<double> candidate_thresholds(const ScoreTable& table, std::span<const std::size_t> rows,
                                         std::size_t route, double step, double current) {
  std::vector<double> c;
  const auto steps = static_cast<std::size_t>(std::floor(1.0 / step + 1e-9));
  for (std::size_t i = 0; i <= steps; ++i) c.push_back(std::min(1.0, static_cast<double>(i) * step));
  c.push_back(1.0);
  std::vector<double> observed;
  observed.reserve(rows.size());
  for (std::size_t row : rows) observed.push_back(table.scores[row][route]);
  std::sort(observed.begin(), observed.end());
  observed.erase(std::unique(observed.begin(), observed.end()), observed.end());
  for (std::size_t i = 1; i < observed.size(); ++i) c.push_back(0.5 * (observed[i - 1] + observed[i]));
  c.push_back(current);
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  return c;
}

// Coordinate ascent can stall on a non-optimal pair; with two routes the
// joint candidate product is small enough to search outright.
void refine_pair(const ScoreTable& table, std::span<const std::size_t> rows, double step,
                 std::vector<double>& thresholds) {
  const auto hits = [&](double t0, double t1) {
    std::size_t n = 0;
    const double thr[2] = {t0, t1};
    for (std::size_t row : rows) {
      const auto pick = select_route(table.scores[row], thr);
      if ((pick ? static_cast<int>(*pick) : -1) == table.truth[row]) ++n;
    }
    return n;
  };
  std::size_t best = hits(thresholds[0], thresholds[1]);
  const auto c0 = candidate_thresholds(table, rows, 0, step, kDefaultThreshold);
  const auto c1 = candidate_thresholds(table, rows, 1, step, kDefaultThreshold);
  for (double t0 : c0) {
    for (double t1 : c1) {
      const auto n = hits(t0, t1);
      if (n > best) {
        best = n;
        thresholds = {t0, t1};
      }
    }
  }
}

}  // namespace

std::vector<double> fit_thresholds(const ScoreTable& table, std::span<const std::size_t> rows,
                                   const TuningOptions& options) {
  if (!(options.grid_step > 0.0 && options.grid_step <= 0.25)) {
    throw Error(ErrorCode::kInvalidArgument, "grid_step must be in (0, 0.25]");
  }
  if (options.max_passes < 1) throw Error(ErrorCode::kInvalidArgument, "max_passes must be >= 1");
  const auto selected = all_rows(table, rows);
  if (selected.empty()) throw Error(ErrorCode::kEmptyTrainSet, "no training samples");

  const std::size_t n_routes = table.route_names.size();
  std::vector<double> thresholds(n_routes, options.initial_threshold);
  for (int pass = 0; pass < options.max_passes; ++pass) {
    bool changed = false;
    for (std::size_t route = 0; route < n_routes; ++route) {
      const CoordinateObjective objective(table, selected, thresholds, route);
      double best_value = thresholds[route];
      std::size_t best_hits = 0;
      bool first = true;
      for (double t : candidate_thresholds(table, selected, route, options.grid_step, thresholds[route])) {
        const std::size_t hits = objective.correct(t);
        if (first || hits > best_hits) {
          best_hits = hits;
          best_value = t;
          first = false;
        }
      }
      if (best_value != thresholds[route]) {
        thresholds[route] = best_value;
        changed = true;
      }
    }
    if (!changed) break;
  }
  if (n_routes == 2) refine_pair(table, selected, options.grid_step, thresholds);
  return thresholds;
}

ThresholdSet fit_thresholds(const Router& router, std::span<const LabeledPrompt> train_set,
                            const TuningOptions& options) {
  if (train_set.empty()) throw Error(ErrorCode::kEmptyTrainSet, "training set is empty");
  const auto table = score_prompts(router, train_set);
  const auto values = fit_thresholds(table, {}, options);
  ThresholdSet out;
  for (std::size_t i = 0; i < values.size(); ++i) out.emplace(table.route_names[i], values[i]);
  return out;
}

}  // namespace intent_router
