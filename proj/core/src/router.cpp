#include "intent_router/router.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "intent_router/error.hpp"

namespace intent_router {

double aggregate_similarities(std::span<const double> sims, std::size_t top_k) {
  if (sims.empty()) throw Error(ErrorCode::kEmptyInput, "no similarities to aggregate");
  if (top_k == 0) throw Error(ErrorCode::kInvalidArgument, "top_k must be positive");
  const std::size_t take = std::min(top_k, sims.size());
  std::vector<double> sorted(sims.begin(), sims.end());
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(take), sorted.end(),
                    std::greater<>());
  double sum = 0.0;
  for (std::size_t i = 0; i < take; ++i) sum += sorted[i];
  return std::clamp(sum / static_cast<double>(take), 0.0, 1.0);
}

std::optional<std::size_t> select_route(std::span<const double> scores,
                                        std::span<const double> thresholds) {
  if (scores.size() != thresholds.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "scores and thresholds differ in length");
  }
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!meets_threshold(scores[i], thresholds[i])) continue;
    if (!best || scores[i] > scores[*best]) best = i;
  }
  return best;
}

namespace {

void check_routes(const std::vector<Route>& routes) {
  if (routes.empty()) throw Error(ErrorCode::kNoRoutes, "router needs at least one route");
  std::set<std::string> seen;
  for (const auto& r : routes) {
    if (r.name.empty()) throw Error(ErrorCode::kInvalidArgument, "route name is empty");
    if (r.name == kNoneRoute) {
      throw Error(ErrorCode::kInvalidArgument, "route name NONE is reserved");
    }
    if (!seen.insert(r.name).second) throw Error(ErrorCode::kDuplicateRouteName, r.name);
    if (r.utterances.empty()) throw Error(ErrorCode::kEmptyUtterances, r.name);
    if (!(r.threshold >= 0.0 && r.threshold <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "threshold of " + r.name + " outside [0, 1]");
    }
  }
}

}  // namespace

Router Router::build(std::vector<Route> routes, std::shared_ptr<const Encoder> encoder,
                     std::size_t top_k) {
  check_routes(routes);
  if (!encoder) throw Error(ErrorCode::kInvalidArgument, "router needs an encoder");
  // Embed all utterances in a single batch so remote encoders see one call per batch.
  std::vector<std::string> flat;
  for (const auto& r : routes) flat.insert(flat.end(), r.utterances.begin(), r.utterances.end());
  auto vectors = encoder->encode_batch(flat);
  std::vector<std::vector<EmbeddingVector>> embeddings;
  embeddings.reserve(routes.size());
  std::size_t cursor = 0;
  for (const auto& r : routes) {
    embeddings.emplace_back(std::make_move_iterator(vectors.begin() + static_cast<std::ptrdiff_t>(cursor)),
                            std::make_move_iterator(vectors.begin() +
                                                    static_cast<std::ptrdiff_t>(cursor + r.utterances.size())));
    cursor += r.utterances.size();
  }
  return from_embeddings(std::move(routes), std::move(encoder), std::move(embeddings), top_k);
}

Router Router::from_embeddings(std::vector<Route> routes, std::shared_ptr<const Encoder> encoder,
                               std::vector<std::vector<EmbeddingVector>> embeddings,
                               std::size_t top_k) {
  check_routes(routes);
  if (!encoder) throw Error(ErrorCode::kInvalidArgument, "router needs an encoder");
  if (top_k == 0) throw Error(ErrorCode::kInvalidArgument, "top_k must be positive");
  if (embeddings.size() != routes.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one embedding list per route required");
  }
  auto index = std::make_shared<Index>();
  index->dim = embeddings.front().empty() ? 0 : embeddings.front().front().dim();
  for (std::size_t i = 0; i < routes.size(); ++i) {
    if (embeddings[i].size() != routes[i].utterances.size()) {
      throw Error(ErrorCode::kInvalidArgument, "embedding count differs from utterances of " +
                                                   routes[i].name);
    }
    for (const auto& e : embeddings[i]) {
      if (e.dim() != index->dim) {
        throw Error(ErrorCode::kDimensionMismatch, "utterance embeddings of " + routes[i].name);
      }
    }
  }
  std::vector<double> thresholds;
  thresholds.reserve(routes.size());
  for (const auto& r : routes) thresholds.push_back(r.threshold);
  index->routes = std::move(routes);
  index->embeddings = std::move(embeddings);
  index->encoder = std::move(encoder);
  index->top_k = top_k;
  return Router(std::move(index), std::move(thresholds));
}

ThresholdSet Router::threshold_set() const {
  ThresholdSet out;
  for (std::size_t i = 0; i < size(); ++i) out.emplace(index_->routes[i].name, thresholds_[i]);
  return out;
}

std::vector<std::string> Router::route_names() const {
  std::vector<std::string> names;
  names.reserve(size());
  for (const auto& r : index_->routes) names.push_back(r.name);
  return names;
}

std::optional<std::size_t> Router::route_index(std::string_view name) const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (index_->routes[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<double> Router::score_routes(const EmbeddingVector& query) const {
  if (query.dim() != index_->dim) {
    throw Error(ErrorCode::kDimensionMismatch, "query dim " + std::to_string(query.dim()) +
                                                   ", router dim " + std::to_string(index_->dim));
  }
  std::vector<double> scores;
  scores.reserve(size());
  std::vector<double> sims;
  for (const auto& utterances : index_->embeddings) {
    sims.clear();
    for (const auto& u : utterances) sims.push_back(query.dot(u));
    scores.push_back(aggregate_similarities(sims, index_->top_k));
  }
  return scores;
}

namespace {

RoutingDecision decide(const Router& router, std::vector<double> scores, std::string text) {
  RoutingDecision d;
  const auto chosen = select_route(scores, router.thresholds());
  if (chosen) {
    d.route = router.routes()[*chosen].name;
    d.score = scores[*chosen];
  } else {
    d.score = *std::max_element(scores.begin(), scores.end());
  }
  d.per_route_scores.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    d.per_route_scores.emplace_back(router.routes()[i].name, scores[i]);
  }
  d.text = std::move(text);
  return d;
}

}  // namespace

RoutingDecision Router::route_query(std::string_view text) const {
  if (text.empty()) throw Error(ErrorCode::kEmptyInput, "query text is empty");
  const auto start = std::chrono::steady_clock::now();
  const auto query = index_->encoder->encode(text);
  auto scores = score_routes(query);
  auto d = decide(*this, std::move(scores), std::string(text));
  d.elapsed = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start);
  return d;
}

RoutingDecision Router::route_embedding(const EmbeddingVector& query, std::string text) const {
  const auto start = std::chrono::steady_clock::now();
  auto d = decide(*this, score_routes(query), std::move(text));
  d.elapsed = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start);
  return d;
}

Router Router::with_thresholds(const ThresholdSet& thresholds) const {
  if (thresholds.size() != size()) {
    throw Error(ErrorCode::kInvalidArgument, "threshold set must have one entry per route");
  }
  std::vector<double> values;
  values.reserve(size());
  for (const auto& r : index_->routes) {
    auto it = thresholds.find(r.name);
    if (it == thresholds.end()) throw Error(ErrorCode::kInvalidArgument, "no threshold for " + r.name);
    values.push_back(it->second);
  }
  return with_thresholds(values);
}

Router Router::with_thresholds(std::span<const double> thresholds) const {
  if (thresholds.size() != size()) {
    throw Error(ErrorCode::kInvalidArgument, "threshold count differs from route count");
  }
  for (double t : thresholds) {
    if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "threshold outside [0, 1]");
  }
  return Router(index_, std::vector<double>(thresholds.begin(), thresholds.end()));
}

nlohmann::ordered_json to_json(const RouteSet& set) {
  nlohmann::ordered_json j;
  j["routes"] = nlohmann::ordered_json::array();
  for (const auto& r : set.routes) {
    nlohmann::ordered_json rj;
    rj["name"] = r.name;
    rj["threshold"] = r.threshold;
    rj["utterances"] = r.utterances;
    rj["action"] = r.action;
    j["routes"].push_back(std::move(rj));
  }
  j["encoder"] = to_json(set.encoder);
  j["top_k"] = set.top_k;
  return j;
}

RouteSet route_set_from_json(const nlohmann::json& j) {
  RouteSet set;
  try {
    for (const auto& rj : j.at("routes")) {
      Route r;
      r.name = rj.at("name").get<std::string>();
      r.threshold = rj.value("threshold", kDefaultThreshold);
      r.utterances = rj.at("utterances").get<std::vector<std::string>>();
      r.action = rj.value("action", "");
      set.routes.push_back(std::move(r));
    }
    if (j.contains("encoder")) set.encoder = encoder_from_json(j.at("encoder"));
    set.top_k = j.value("top_k", kDefaultTopK);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("route set: ") + e.what());
  }
  check_routes(set.routes);
  return set;
}

RouteSet route_set_of(const Router& router) {
  RouteSet set;
  set.routes.assign(router.routes().begin(), router.routes().end());
  for (std::size_t i = 0; i < set.routes.size(); ++i) set.routes[i].threshold = router.thresholds()[i];
  set.encoder = router.encoder().descriptor();
  set.top_k = router.top_k();
  return set;
}

}  // namespace intent_router
