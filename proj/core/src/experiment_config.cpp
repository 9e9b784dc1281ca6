#include <fstream>
#include <set>

#include "intent_router/error.hpp"
#include "intent_router/experiments.hpp"

namespace intent_router {

namespace {

constexpr std::pair<ExperimentKind, std::string_view> kKindNames[] = {
    {ExperimentKind::kUtterance, "utterance"},     {ExperimentKind::kDiversity, "diversity"},
    {ExperimentKind::kEncoder, "encoder"},         {ExperimentKind::kComparison, "comparison"},
    {ExperimentKind::kQuantization, "quantization"},
};

void reject_unknown_keys(const nlohmann::json& j, std::string_view where, std::initializer_list<std::string_view> known,
                         std::vector<std::string>& problems) {
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      problems.push_back("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

// Collects json type errors as problems instead of aborting on the first.
template <typename F>
void guarded(std::string_view what, std::vector<std::string>& problems, F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    for (const auto& p : e.problems()) problems.push_back(std::string(what) + ": " + p);
  } catch (const nlohmann::json::exception& e) {
    problems.push_back(std::string(what) + ": " + e.what());
  } catch (const Error& e) {
    problems.push_back(std::string(what) + ": " + e.what());
  }
}

MockChatConfig mock_from_json(const nlohmann::json& j, std::string_view where, std::vector<std::string>& problems) {
  MockChatConfig m;
  if (!j.is_object()) {
    problems.push_back(std::string(where) + " must be an object");
    return m;
  }
  reject_unknown_keys(j, where, {"delay_ms", "hallucination"}, problems);
  m.delay = std::chrono::milliseconds(j.value("delay_ms", m.delay.count()));
  if (j.contains("hallucination")) {
    const auto& h = j.at("hallucination");
    reject_unknown_keys(h, std::string(where) + ".hallucination", {"onset", "rate"}, problems);
    m.hallucination.onset = h.value("onset", m.hallucination.onset);
    m.hallucination.rate = h.value("rate", m.hallucination.rate);
  }
  return m;
}

nlohmann::ordered_json to_json(const MockChatConfig& m) {
  return nlohmann::ordered_json{
      {"delay_ms", m.delay.count()},
      {"hallucination", {{"onset", m.hallucination.onset}, {"rate", m.hallucination.rate}}}};
}

void check_mock(const MockChatConfig& m, std::string_view where, std::vector<std::string>& problems) {
  if (m.delay.count() < 0) problems.push_back(std::string(where) + ".delay_ms must be >= 0");
  if (!(m.hallucination.rate >= 0.0 && m.hallucination.rate <= 1.0)) {
    problems.push_back(std::string(where) + ".hallucination.rate must be in [0, 1]");
  }
}

}  // namespace

std::string_view to_string(ExperimentKind kind) noexcept {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) noexcept {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::vector<UtteranceSpec> default_specs(ExperimentKind kind) {
  if (kind == ExperimentKind::kDiversity) return {{5, 0, 0}, {5, 5, 0}, {5, 0, 5}, {5, 5, 5}};
  return {{0, 0, 0}, {5, 5, 5}, {10, 10, 10}, {15, 15, 15}};
}

std::vector<UtteranceSpec> ExperimentConfig::specs_for(ExperimentKind kind) const {
  switch (kind) {
    case ExperimentKind::kComparison:
    case ExperimentKind::kQuantization: return {utterance_spec};
    default: return specs.empty() ? default_specs(kind) : specs;
  }
}

void ExperimentConfig::validate(ExperimentKind kind) const {
  std::vector<std::string> problems;
  if (corpus_path.empty()) {
    problems.emplace_back("corpus path is empty");
  } else if (!std::filesystem::is_regular_file(corpus_path)) {
    problems.push_back("corpus file not found: " + corpus_path.string());
  }
  if (k_folds < 2) problems.push_back("k_folds must be >= 2, got " + std::to_string(k_folds));
  if (top_k < 1) problems.emplace_back("top_k must be >= 1");
  if (encoders.empty()) problems.emplace_back("no encoder configured");
  std::set<std::string> names;
  for (std::size_t i = 0; i < encoders.size(); ++i) {
    const std::string where = "encoders[" + std::to_string(i) + "]";
    guarded(where, problems, [&] { encoders[i].validate(); });
    if (!names.insert(encoders[i].name).second) problems.push_back(where + ": duplicate encoder name '" + encoders[i].name + "'");
    const bool used = kind == ExperimentKind::kEncoder || i == 0;
    if (used && encoders[i].kind == EncoderKind::kRemote && !allow_remote) {
      problems.push_back(where + ": remote encoder '" + encoders[i].name + "' requires allow_remote");
    }
  }
  if (kind == ExperimentKind::kEncoder && encoders.size() < 2) {
    problems.emplace_back("encoder experiment needs at least 2 encoders");
  }
  for (const auto& spec : specs_for(kind)) {
    guarded("spec " + spec.label(), problems, [&] { spec.validate(); });
  }
  if (tuning.enabled) {
    if (!(tuning.grid_step > 0.0 && tuning.grid_step <= 0.25)) problems.emplace_back("tuning.grid_step must be in (0, 0.25]");
    if (tuning.max_passes < 1) problems.emplace_back("tuning.max_passes must be >= 1");
  }
  if (kind == ExperimentKind::kComparison || kind == ExperimentKind::kQuantization) {
    check_mock(mock, "mock", problems);
    if (comparison.max_in_flight < 1) problems.emplace_back("comparison.max_in_flight must be >= 1");
    if (comparison.expected_ratio <= 0.0) problems.emplace_back("comparison.expected_ratio must be > 0");
    if (comparison.max_samples != 0 && comparison.max_samples < comparison.min_samples) {
      problems.emplace_back("comparison.max_samples must be 0 or >= min_samples");
    }
    if (!(comparison.hallucination_rate >= 0.0 && comparison.hallucination_rate <= 1.0)) {
      problems.emplace_back("comparison.hallucination_rate must be in [0, 1]");
    }
  }
  if (kind == ExperimentKind::kQuantization) {
    if (llm_endpoints.empty()) problems.emplace_back("quantization sweep needs at least 1 llm endpoint");
    std::set<std::string> endpoint_names;
    for (std::size_t i = 0; i < llm_endpoints.size(); ++i) {
      const auto& e = llm_endpoints[i];
      const std::string where = "llm_endpoints[" + std::to_string(i) + "]";
      if (e.name.empty()) problems.push_back(where + ": name is empty");
      if (!endpoint_names.insert(e.name).second) problems.push_back(where + ": duplicate name '" + e.name + "'");
      if (e.remote.has_value() == e.mock.has_value()) {
        problems.push_back(where + ": needs exactly one of endpoint/model or mock");
      }
      if (e.mock) check_mock(*e.mock, where + ".mock", problems);
      if (e.remote) {
        guarded(where, problems, [&] { (void)ChatClient(*e.remote); });
        if (!allow_remote) problems.push_back(where + ": remote endpoint '" + e.name + "' requires allow_remote");
      }
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

ExperimentConfig experiment_preset(ExperimentKind kind, std::filesystem::path corpus_path) {
  ExperimentConfig c;
  c.corpus_path = std::move(corpus_path);
  c.output_dir = std::filesystem::path("results") / std::string(to_string(kind));
  switch (kind) {
    case ExperimentKind::kEncoder: {
      EncoderDescriptor small;
      small.name = "reference-128";
      small.dim = 128;
      c.encoders.push_back(small);
      break;
    }
    case ExperimentKind::kQuantization:
      for (const char* level : {"Q2_K", "Q4_K_S", "Q6_K"}) {
        c.llm_endpoints.push_back({level, std::nullopt, MockChatConfig{}});
      }
      break;
    default: break;
  }
  return c;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError({"experiment config must be a JSON object"});
  std::vector<std::string> problems;
  ExperimentConfig c;
  reject_unknown_keys(j, "config",
                      {"corpus", "encoder", "encoders", "utterance_spec", "specs", "k_folds", "rng_seed", "top_k",
                       "tuning", "mock", "comparison", "llm_endpoints", "output_dir", "allow_remote"},
                      problems);
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };

  guarded("corpus", problems, [&] {
    if (!j.contains("corpus")) throw ConfigError({"missing"});
    c.corpus_path = resolve(j.at("corpus").get<std::string>());
  });
  if (j.contains("encoder") && j.contains("encoders")) problems.emplace_back("give either encoder or encoders, not both");
  if (j.contains("encoder")) {
    guarded("encoder", problems, [&] { c.encoders = {encoder_from_json(j.at("encoder"))}; });
  } else if (j.contains("encoders")) {
    c.encoders.clear();
    guarded("encoders", problems, [&] {
      for (std::size_t i = 0; i < j.at("encoders").size(); ++i) {
        guarded("[" + std::to_string(i) + "]", problems,
                [&] { c.encoders.push_back(encoder_from_json(j.at("encoders").at(i))); });
      }
    });
  }
  for (auto& e : c.encoders) {
    if (e.cache_dir) e.cache_dir = resolve(*e.cache_dir).string();
  }
  guarded("utterance_spec", problems, [&] {
    if (j.contains("utterance_spec")) c.utterance_spec = utterance_spec_from_json(j.at("utterance_spec"));
  });
  guarded("specs", problems, [&] {
    if (!j.contains("specs")) return;
    for (const auto& s : j.at("specs")) c.specs.push_back(utterance_spec_from_json(s));
  });
  guarded("k_folds", problems, [&] { c.k_folds = j.value("k_folds", c.k_folds); });
  guarded("rng_seed", problems, [&] { c.rng_seed = j.value("rng_seed", c.rng_seed); });
  guarded("top_k", problems, [&] { c.top_k = j.value("top_k", c.top_k); });
  guarded("tuning", problems, [&] {
    if (!j.contains("tuning")) return;
    const auto& t = j.at("tuning");
    reject_unknown_keys(t, "tuning", {"enabled", "grid_step", "max_passes"}, problems);
    c.tuning.enabled = t.value("enabled", c.tuning.enabled);
    c.tuning.grid_step = t.value("grid_step", c.tuning.grid_step);
    c.tuning.max_passes = t.value("max_passes", c.tuning.max_passes);
  });
  guarded("mock", problems, [&] {
    if (j.contains("mock")) c.mock = mock_from_json(j.at("mock"), "mock", problems);
  });
  guarded("comparison", problems, [&] {
    if (!j.contains("comparison")) return;
    const auto& k = j.at("comparison");
    reject_unknown_keys(k, "comparison",
                        {"expected_ratio", "max_in_flight", "min_samples", "max_samples", "hallucination_rate",
                         "hallucination_onset"},
                        problems);
    c.comparison.expected_ratio = k.value("expected_ratio", c.comparison.expected_ratio);
    c.comparison.max_in_flight = k.value("max_in_flight", c.comparison.max_in_flight);
    c.comparison.min_samples = k.value("min_samples", c.comparison.min_samples);
    c.comparison.max_samples = k.value("max_samples", c.comparison.max_samples);
    c.comparison.hallucination_rate = k.value("hallucination_rate", c.comparison.hallucination_rate);
    c.comparison.hallucination_onset = k.value("hallucination_onset", c.comparison.hallucination_onset);
  });
  guarded("llm_endpoints", problems, [&] {
    if (!j.contains("llm_endpoints")) return;
    const auto& list = j.at("llm_endpoints");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto& e = list.at(i);
      const std::string where = "llm_endpoints[" + std::to_string(i) + "]";
      reject_unknown_keys(e, where, {"name", "endpoint", "model", "timeout_ms", "mock"}, problems);
      LlmEndpointConfig ep;
      ep.name = e.value("name", "");
      if (e.contains("endpoint") || e.contains("model")) {
        ChatClientConfig cc;
        cc.endpoint = e.value("endpoint", "");
        cc.model = e.value("model", "");
        cc.timeout = std::chrono::milliseconds(e.value("timeout_ms", cc.timeout.count()));
        ep.remote = cc;
      }
      if (e.contains("mock")) ep.mock = mock_from_json(e.at("mock"), where + ".mock", problems);
      c.llm_endpoints.push_back(std::move(ep));
    }
  });
  guarded("output_dir", problems, [&] {
    if (j.contains("output_dir")) c.output_dir = resolve(j.at("output_dir").get<std::string>());
  });
  guarded("allow_remote", problems, [&] { c.allow_remote = j.value("allow_remote", c.allow_remote); });
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError({"config " + path.string() + " is not valid JSON: " + e.what()});
  }
  return experiment_config_from_json(j, path.parent_path());
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["corpus"] = c.corpus_path.generic_string();
  j["encoders"] = nlohmann::ordered_json::array();
  for (const auto& e : c.encoders) j["encoders"].push_back(to_json(e));
  j["utterance_spec"] = to_json(c.utterance_spec);
  j["specs"] = nlohmann::ordered_json::array();
  for (const auto& s : c.specs) j["specs"].push_back(to_json(s));
  j["k_folds"] = c.k_folds;
  j["rng_seed"] = c.rng_seed;
  j["top_k"] = c.top_k;
  j["tuning"] = {{"enabled", c.tuning.enabled}, {"grid_step", c.tuning.grid_step}, {"max_passes", c.tuning.max_passes}};
  j["mock"] = to_json(c.mock);
  j["comparison"] = {{"expected_ratio", c.comparison.expected_ratio},
                     {"max_in_flight", c.comparison.max_in_flight},
                     {"min_samples", c.comparison.min_samples},
                     {"max_samples", c.comparison.max_samples},
                     {"hallucination_rate", c.comparison.hallucination_rate},
                     {"hallucination_onset", c.comparison.hallucination_onset}};
  j["llm_endpoints"] = nlohmann::ordered_json::array();
  for (const auto& e : c.llm_endpoints) {
    nlohmann::ordered_json ej{{"name", e.name}};
    if (e.remote) {
      ej["endpoint"] = e.remote->endpoint;
      ej["model"] = e.remote->model;
      ej["timeout_ms"] = e.remote->timeout.count();
    }
    if (e.mock) ej["mock"] = to_json(*e.mock);
    j["llm_endpoints"].push_back(std::move(ej));
  }
  j["output_dir"] = c.output_dir.generic_string();
  j["allow_remote"] = c.allow_remote;
  return j;
}

}  // namespace intent_router
