#include "intent_router/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "intent_router/error.hpp"
#include "intent_router/rng.hpp"

namespace intent_router {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string percent(double x) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * x);
  return buf;
}

std::string fixed(double x, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::vector<ExperimentResult> run_sweep(const ExperimentConfig& config, ExperimentKind kind,
                                        std::span<const EncoderDescriptor> encoders) {
  const auto specs = config.specs_for(kind);
  const ExperimentData data(load_corpus(config.corpus_path), specs, config.k_folds, config.rng_seed);
  std::vector<ExperimentResult> out;
  for (const auto& desc : encoders) {
    const auto encoder = make_encoder(desc);
    for (const auto& spec : specs) out.push_back(run_cell(data, spec, encoder, config));
  }
  return out;
}

// Fold-tuned routers and the samples sent through both paths.
struct ComparisonSetup {
  std::vector<Router> fold_routers;
  std::vector<LabeledPrompt> samples;
  std::vector<int> sample_fold;
  std::vector<std::string> labels;
};

ComparisonSetup prepare_comparison(const ExperimentConfig& config) {
  const std::vector<UtteranceSpec> specs{config.utterance_spec};
  const ExperimentData data(load_corpus(config.corpus_path), specs, config.k_folds, config.rng_seed);
  const Router router = compose_router(data.corpus(), config.utterance_spec, make_encoder(config.encoder()),
                                       config.rng_seed, config.top_k);

  std::vector<LabeledPrompt> evaluated;
  for (auto i : data.evaluated()) evaluated.push_back(data.pool()[i]);
  const ScoreTable table = score_prompts(router, evaluated);

  ComparisonSetup setup;
  setup.labels = router.route_names();
  const TuningOptions opts{config.tuning.grid_step, config.tuning.max_passes, kDefaultThreshold};
  for (int f = 0; f < config.k_folds; ++f) {
    std::vector<std::size_t> train;
    for (std::size_t p = 0; p < evaluated.size(); ++p) {
      if (data.fold_of()[data.evaluated()[p]] != f) train.push_back(p);
    }
    if (config.tuning.enabled && !train.empty()) {
      setup.fold_routers.push_back(router.with_thresholds(fit_thresholds(table, train, opts)));
    } else {
      setup.fold_routers.push_back(router);
    }
  }

  std::vector<std::size_t> chosen(evaluated.size());
  for (std::size_t p = 0; p < chosen.size(); ++p) chosen[p] = p;
  const std::size_t limit = config.comparison.max_samples;
  if (limit != 0 && limit < chosen.size()) {
    DeterministicRng rng(derive_seed(config.rng_seed, "comparison"));
    rng.shuffle(std::span<std::size_t>(chosen));
    chosen.resize(limit);
    std::sort(chosen.begin(), chosen.end());
  }
  for (auto p : chosen) {
    setup.samples.push_back(evaluated[p]);
    setup.sample_fold.push_back(data.fold_of()[data.evaluated()[p]]);
  }
  return setup;
}

ComparisonReport compare_with(const ComparisonSetup& setup, const ChatClient& client, const ExperimentConfig& config) {
  CompareOptions opts;
  opts.expected_ratio = config.comparison.expected_ratio;
  opts.max_in_flight = config.comparison.max_in_flight;
  opts.min_samples = config.comparison.min_samples;
  return compare_latency(
      [&setup](std::size_t i) -> const Router& {
        return setup.fold_routers.at(static_cast<std::size_t>(setup.sample_fold.at(i)));
      },
      client, setup.samples, setup.labels, opts);
}

ComparisonReport compare_on_mock(const ComparisonSetup& setup, const MockChatConfig& mock,
                                 const ExperimentConfig& config) {
  std::map<std::string, std::string> answers;
  for (const auto& s : setup.samples) answers.emplace(s.text, s.label);
  IntentOracleResponder responder(std::move(answers), mock.hallucination);
  MockChatServer server(responder, mock.delay);
  ChatClientConfig cc;
  cc.endpoint = server.endpoint();
  cc.model = "mock-intent-classifier";
  cc.timeout = mock.delay + std::chrono::milliseconds(30000);
  const ChatClient client(cc);
  return compare_with(setup, client, config);
}

}  // namespace

ExperimentData::ExperimentData(Corpus corpus, std::span<const UtteranceSpec> specs, int k_folds, std::uint64_t seed)
    : corpus_(std::move(corpus)), seed_(seed) {
  const auto prompts = corpus_.prompts();
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    if (prompts[i].variant == Variant::kSeed) {
      pool_.push_back(prompts[i]);
      corpus_index_.push_back(i);
    }
  }
  folds_ = kfold_split(pool_, k_folds, seed);
  fold_of_.assign(pool_.size(), -1);
  for (std::size_t f = 0; f < folds_.size(); ++f) {
    for (auto i : folds_[f]) fold_of_[i] = static_cast<int>(f);
  }

  std::set<std::size_t> consumed;
  for (const auto& spec : specs) {
    spec.validate();
    for (const auto& route : builtin_route_names()) {
      const auto composed = compose_utterances(corpus_, spec, route, seed);
      consumed.insert(composed.consumed.begin(), composed.consumed.end());
    }
  }
  for (std::size_t p = 0; p < pool_.size(); ++p) {
    if (!consumed.contains(corpus_index_[p])) evaluated_.push_back(p);
  }
  if (evaluated_.empty()) throw Error(ErrorCode::kInsufficientSamples, "no seed prompts left to evaluate");
}

Router compose_router(const Corpus& corpus, const UtteranceSpec& spec, std::shared_ptr<const Encoder> encoder,
                      std::uint64_t seed, std::size_t top_k) {
  spec.validate();
  std::vector<Route> routes = builtin_routes();
  for (auto& r : routes) r.utterances = compose_utterances(corpus, spec, r.name, seed).utterances;
  return Router::build(std::move(routes), std::move(encoder), top_k);
}

ExperimentResult run_cell(const ExperimentData& data, const UtteranceSpec& spec,
                          std::shared_ptr<const Encoder> encoder, const ExperimentConfig& config) {
  const auto start = Clock::now();
  ExperimentResult r;
  r.encoder = encoder->descriptor().name;
  r.spec = spec;
  r.k_folds = config.k_folds;
  r.rng_seed = config.rng_seed;

  const Router router = compose_router(data.corpus(), spec, encoder, data.seed(), config.top_k);
  r.utterances_per_route = router.routes().front().utterances.size();
  std::vector<LabeledPrompt> evaluated;
  evaluated.reserve(data.evaluated().size());
  for (auto i : data.evaluated()) evaluated.push_back(data.pool()[i]);
  const ScoreTable table = score_prompts(router, evaluated);
  r.timing.encode_ms = ms_since(start);

  const std::vector<double> initial(router.thresholds().begin(), router.thresholds().end());
  const TuningOptions opts{config.tuning.grid_step, config.tuning.max_passes, kDefaultThreshold};
  std::vector<EvaluationReport> pre_train, pre_test, post_train, post_test;
  const auto names = router.route_names();
  for (std::size_t f = 0; f < data.folds().size(); ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t p = 0; p < evaluated.size(); ++p) {
      (data.fold_of()[data.evaluated()[p]] == static_cast<int>(f) ? test : train).push_back(p);
    }
    if (train.empty() || test.empty()) {
      throw Error(ErrorCode::kInsufficientSamples, "fold " + std::to_string(f) + " has no train or test samples");
    }
    pre_train.push_back(evaluate_scores(table, initial, train));
    pre_test.push_back(evaluate_scores(table, initial, test));
    std::vector<double> tuned = initial;
    if (config.tuning.enabled) {
      const auto t0 = Clock::now();
      tuned = fit_thresholds(table, train, opts);
      r.timing.tune_ms += ms_since(t0);
    }
    post_train.push_back(evaluate_scores(table, tuned, train));
    post_test.push_back(evaluate_scores(table, tuned, test));
    ThresholdSet ts;
    for (std::size_t i = 0; i < names.size(); ++i) ts[names[i]] = tuned[i];
    r.fold_thresholds.push_back(std::move(ts));
  }
  r.pre_train = pool_reports(pre_train);
  r.pre_test = pool_reports(pre_test);
  r.post_train = pool_reports(post_train);
  r.post_test = pool_reports(post_test);
  r.timing.total_ms = ms_since(start);
  return r;
}

std::vector<ExperimentResult> run_utterance_experiment(const ExperimentConfig& config) {
  config.validate(ExperimentKind::kUtterance);
  return run_sweep(config, ExperimentKind::kUtterance, std::span(config.encoders).first(1));
}

std::vector<ExperimentResult> run_diversity_experiment(const ExperimentConfig& config) {
  config.validate(ExperimentKind::kDiversity);
  return run_sweep(config, ExperimentKind::kDiversity, std::span(config.encoders).first(1));
}

std::vector<ExperimentResult> run_encoder_experiment(const ExperimentConfig& config) {
  config.validate(ExperimentKind::kEncoder);
  return run_sweep(config, ExperimentKind::kEncoder, config.encoders);
}

std::vector<ComparisonResult> run_comparison_experiment(const ExperimentConfig& config) {
  config.validate(ExperimentKind::kComparison);
  const auto setup = prepare_comparison(config);
  MockChatConfig clean = config.mock;
  clean.hallucination = {};
  MockChatConfig faulty = config.mock;
  faulty.hallucination = {config.comparison.hallucination_onset, config.comparison.hallucination_rate};
  std::vector<ComparisonResult> out;
  out.push_back({"mock", "clean", compare_on_mock(setup, clean, config)});
  out.push_back({"mock", "hallucinating", compare_on_mock(setup, faulty, config)});
  return out;
}

std::vector<ComparisonResult> run_quantization_sweep(const ExperimentConfig& config) {
  config.validate(ExperimentKind::kQuantization);
  const auto setup = prepare_comparison(config);
  std::vector<ComparisonResult> out;
  for (const auto& e : config.llm_endpoints) {
    if (e.mock) {
      out.push_back({e.name, "mock", compare_on_mock(setup, *e.mock, config)});
    } else {
      const ChatClient client(*e.remote);
      out.push_back({e.name, "remote", compare_with(setup, client, config)});
    }
  }
  return out;
}

ExperimentRun run_experiment(ExperimentKind kind, const ExperimentConfig& config) {
  const auto start = Clock::now();
  ExperimentRun run;
  run.kind = kind;
  run.config = config;
  switch (kind) {
    case ExperimentKind::kUtterance: run.results = run_utterance_experiment(config); break;
    case ExperimentKind::kDiversity: run.results = run_diversity_experiment(config); break;
    case ExperimentKind::kEncoder: run.results = run_encoder_experiment(config); break;
    case ExperimentKind::kComparison: run.comparisons = run_comparison_experiment(config); break;
    case ExperimentKind::kQuantization: run.comparisons = run_quantization_sweep(config); break;
  }
  run.elapsed_ms = ms_since(start);
  return run;
}

nlohmann::ordered_json to_json(const ExperimentResult& r) {
  nlohmann::ordered_json j;
  j["encoder"] = r.encoder;
  j["spec"] = to_json(r.spec);
  j["spec_label"] = r.spec.label();
  j["k_folds"] = r.k_folds;
  j["rng_seed"] = r.rng_seed;
  j["utterances_per_route"] = r.utterances_per_route;
  j["pre_tuning"] = {{"train", to_json(r.pre_train)}, {"test", to_json(r.pre_test)}};
  j["post_tuning"] = {{"train", to_json(r.post_train)}, {"test", to_json(r.post_test)}};
  j["fold_thresholds"] = nlohmann::ordered_json::array();
  for (const auto& ts : r.fold_thresholds) {
    nlohmann::ordered_json t = nlohmann::ordered_json::object();
    for (const auto& [name, value] : ts) t[name] = value;
    j["fold_thresholds"].push_back(std::move(t));
  }
  j["timing"] = {{"encode_ms", r.timing.encode_ms}, {"tune_ms", r.timing.tune_ms}, {"total_ms", r.timing.total_ms}};
  return j;
}

nlohmann::ordered_json to_json(const ComparisonResult& r) {
  return nlohmann::ordered_json{{"endpoint", r.endpoint}, {"condition", r.condition}, {"report", to_json(r.report)}};
}

nlohmann::ordered_json to_json(const ExperimentRun& run) {
  nlohmann::ordered_json j;
  j["experiment"] = std::string(to_string(run.kind));
  j["config"] = to_json(run.config);
  if (!run.results.empty() || run.comparisons.empty()) {
    j["results"] = nlohmann::ordered_json::array();
    for (const auto& r : run.results) j["results"].push_back(to_json(r));
  }
  if (!run.comparisons.empty()) {
    j["comparisons"] = nlohmann::ordered_json::array();
    for (const auto& c : run.comparisons) j["comparisons"].push_back(to_json(c));
  }
  j["elapsed_ms"] = run.elapsed_ms;
  return j;
}

std::string render_table(const ExperimentRun& run) {
  std::ostringstream out;
  out << "experiment: " << to_string(run.kind) << " (k=" << run.config.k_folds << ", seed=" << run.config.rng_seed
      << ")\n";
  if (!run.results.empty()) {
    out << "mean fold accuracy (%)\n";
    out << pad("encoder", 16) << pad("spec", 12) << pad("utts", 6) << pad("pre-train", 11) << pad("pre-test", 11)
        << pad("post-train", 12) << "post-test\n";
    for (const auto& r : run.results) {
      out << pad(r.encoder, 16) << pad(r.spec.label(), 12) << pad(std::to_string(r.utterances_per_route), 6)
          << pad(percent(r.pre_train.mean_fold_accuracy()), 11) << pad(percent(r.pre_test.mean_fold_accuracy()), 11)
          << pad(percent(r.post_train.mean_fold_accuracy()), 12) << percent(r.post_test.mean_fold_accuracy())
          << "\n";
    }
  }
  if (!run.comparisons.empty()) {
    constexpr std::size_t kWidth = 22;
    out << pad("metric", kWidth);
    for (const auto& c : run.comparisons) out << pad(c.endpoint + "/" + c.condition, kWidth);
    out << "\n";
    auto row = [&](const std::string& name, auto value) {
      out << pad(name, kWidth);
      for (const auto& c : run.comparisons) out << pad(value(c.report), kWidth);
      out << "\n";
    };
    row("samples", [](const ComparisonReport& r) { return std::to_string(r.n_samples); });
    row("router accuracy %", [](const ComparisonReport& r) { return percent(r.router_accuracy()); });
    row("llm accuracy %", [](const ComparisonReport& r) { return percent(r.llm_accuracy()); });
    row("llm hallucinated", [](const ComparisonReport& r) { return std::to_string(r.llm_hallucinated); });
    row("llm failures", [](const ComparisonReport& r) { return std::to_string(r.llm_failures.size()); });
    row("router median ms", [](const ComparisonReport& r) { return fixed(r.router.median_us / 1000.0, 3); });
    row("llm median ms", [](const ComparisonReport& r) { return fixed(r.llm.median_us / 1000.0, 1); });
    row("llm p95 ms", [](const ComparisonReport& r) { return fixed(r.llm.p95_us / 1000.0, 1); });
    row("speedup", [](const ComparisonReport& r) { return fixed(r.ratio, 1) + "x"; });
    row("meets expectation", [](const ComparisonReport& r) { return std::string(r.meets_expectation ? "yes" : "no"); });
  }
  return out.str();
}

std::string render_csv(const ExperimentRun& run) {
  std::ostringstream out;
  const std::string kind(to_string(run.kind));
  if (run.comparisons.empty()) {
    out << "experiment,encoder,spec,a,b,c,utterances_per_route,pre_train,pre_test,post_train,post_test\n";
    for (const auto& r : run.results) {
      out << kind << ',' << r.encoder << ",\"" << r.spec.label() << "\"," << r.spec.seeds << ',' << r.spec.variability
          << ',' << r.spec.paraphrase << ',' << r.utterances_per_route << ',' << fixed(r.pre_train.mean_fold_accuracy(), 6)
          << ',' << fixed(r.pre_test.mean_fold_accuracy(), 6) << ',' << fixed(r.post_train.mean_fold_accuracy(), 6)
          << ',' << fixed(r.post_test.mean_fold_accuracy(), 6) << "\n";
    }
  } else {
    out << "experiment,endpoint,condition,n_samples,router_accuracy,llm_accuracy,llm_hallucinated,llm_failures,"
           "router_median_us,llm_median_us,ratio,meets_expectation\n";
    for (const auto& c : run.comparisons) {
      const auto& r = c.report;
      out << kind << ',' << c.endpoint << ',' << c.condition << ',' << r.n_samples << ','
          << fixed(r.router_accuracy(), 6) << ',' << fixed(r.llm_accuracy(), 6) << ',' << r.llm_hallucinated << ','
          << r.llm_failures.size() << ',' << fixed(r.router.median_us, 1) << ',' << fixed(r.llm.median_us, 1) << ','
          << fixed(r.ratio, 3) << ',' << (r.meets_expectation ? "true" : "false") << "\n";
    }
  }
  return out.str();
}

std::vector<std::filesystem::path> write_reports(const ExperimentRun& run, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  const std::string stem(to_string(run.kind));
  const std::vector<std::pair<std::filesystem::path, std::string>> files = {
      {dir / (stem + ".json"), to_json(run).dump(2) + "\n"},
      {dir / (stem + ".csv"), render_csv(run)},
      {dir / (stem + ".txt"), render_table(run)},
  };
  std::vector<std::filesystem::path> written;
  for (const auto& [path, content] : files) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f || !(f << content)) throw Error(ErrorCode::kIo, "cannot write " + path.string());
    written.push_back(path);
  }
  return written;
}

}  // namespace intent_router
