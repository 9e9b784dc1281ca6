#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "intent_router/embedding.hpp"

namespace intent_router {

inline constexpr double kDefaultThreshold = 0.5;
inline constexpr std::size_t kDefaultTopK = 5;
// A route qualifies when its aggregate score is >= its threshold (not strictly >).
inline constexpr bool kThresholdInclusive = true;
inline constexpr std::string_view kNoneRoute = "NONE";

struct Route {
  std::string name;
  std::vector<std::string> utterances;
  double threshold = kDefaultThreshold;
  std::string action;

  bool operator==(const Route&) const = default;
};

using ThresholdSet = std::map<std::string, double>;

struct RoutingDecision {
  std::optional<std::string> route;  // nullopt is the NONE route
  double score = 0.0;
  std::vector<std::pair<std::string, double>> per_route_scores;  // declaration order
  std::chrono::microseconds elapsed{0};
  std::string text;

  [[nodiscard]] bool is_none() const noexcept { return !route.has_value(); }
  [[nodiscard]] std::string_view route_name() const noexcept {
    return route ? std::string_view(*route) : kNoneRoute;
  }
};

// Mean of the min(top_k, n) largest similarities, clamped to [0, 1].
double aggregate_similarities(std::span<const double> sims, std::size_t top_k);

[[nodiscard]] inline bool meets_threshold(double score, double threshold) noexcept {
  return kThresholdInclusive ? score >= threshold : score > threshold;
}

// Index of the highest-scoring route among those meeting their threshold;
// earlier routes win ties. nullopt when none qualifies.
std::optional<std::size_t> select_route(std::span<const double> scores,
                                        std::span<const double> thresholds);

// Immutable routing layer. Copies share the embedded utterance index; only
// thresholds are per-value, replaced via with_thresholds().
class Router {
 public:
  static Router build(std::vector<Route> routes, std::shared_ptr<const Encoder> encoder,
                      std::size_t top_k = kDefaultTopK);

  // Uses caller-provided utterance embeddings instead of encoding.
  static Router from_embeddings(std::vector<Route> routes, std::shared_ptr<const Encoder> encoder,
                                std::vector<std::vector<EmbeddingVector>> embeddings,
                                std::size_t top_k = kDefaultTopK);

  [[nodiscard]] std::span<const Route> routes() const noexcept { return index_->routes; }
  [[nodiscard]] std::size_t size() const noexcept { return index_->routes.size(); }
  [[nodiscard]] std::size_t top_k() const noexcept { return index_->top_k; }
  [[nodiscard]] std::size_t dim() const noexcept { return index_->dim; }
  [[nodiscard]] const Encoder& encoder() const noexcept { return *index_->encoder; }
  [[nodiscard]] std::shared_ptr<const Encoder> encoder_ptr() const noexcept { return index_->encoder; }
  [[nodiscard]] std::span<const double> thresholds() const noexcept { return thresholds_; }
  [[nodiscard]] ThresholdSet threshold_set() const;
  [[nodiscard]] std::vector<std::string> route_names() const;
  [[nodiscard]] std::optional<std::size_t> route_index(std::string_view name) const;
  [[nodiscard]] std::span<const EmbeddingVector> utterance_embeddings(std::size_t route) const {
    return index_->embeddings.at(route);
  }

  // Aggregate score per route, in declaration order.
  [[nodiscard]] std::vector<double> score_routes(const EmbeddingVector& query) const;

  [[nodiscard]] RoutingDecision route_query(std::string_view text) const;
  // Same decision logic on an already-encoded query; elapsed covers score+select.
  [[nodiscard]] RoutingDecision route_embedding(const EmbeddingVector& query, std::string text = {}) const;

  // New router value; must name every route exactly once, values in [0, 1].
  [[nodiscard]] Router with_thresholds(const ThresholdSet& thresholds) const;
  [[nodiscard]] Router with_thresholds(std::span<const double> thresholds) const;

 private:
  struct Index {
    std::vector<Route> routes;
    std::vector<std::vector<EmbeddingVector>> embeddings;
    std::shared_ptr<const Encoder> encoder;
    std::size_t top_k = kDefaultTopK;
    std::size_t dim = 0;
  };

  Router(std::shared_ptr<const Index> index, std::vector<double> thresholds)
      : index_(std::move(index)), thresholds_(std::move(thresholds)) {}

  std::shared_ptr<const Index> index_;
  std::vector<double> thresholds_;
};

// Route-set document: {"routes":[...], "encoder":{...}, "top_k":int}.
struct RouteSet {
  std::vector<Route> routes;
  EncoderDescriptor encoder;
  std::size_t top_k = kDefaultTopK;
};

nlohmann::ordered_json to_json(const RouteSet& set);
RouteSet route_set_from_json(const nlohmann::json& j);
RouteSet route_set_of(const Router& router);

}  // namespace intent_router
