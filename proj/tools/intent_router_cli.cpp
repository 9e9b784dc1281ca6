#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "intent_router/baseline.hpp"
#include "intent_router/corpus.hpp"
#include "intent_router/dispatch.hpp"
#include "intent_router/error.hpp"
#include "intent_router/experiments.hpp"
#include "intent_router/tuning.hpp"
#include "intent_router/variants.hpp"

namespace ir = intent_router;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfigExit = 2, kDataExit = 3 };

int exit_code_for(const ir::Error& e) {
  switch (e.code()) {
    case ir::ErrorCode::kConfig: return kConfigExit;
    case ir::ErrorCode::kInsufficientPrompts:
    case ir::ErrorCode::kInsufficientSamples:
    case ir::ErrorCode::kEmptyTrainSet: return kDataExit;
    default: return kFailure;
  }
}

void report_error(const ir::Error& e) {
  std::cerr << "error: " << e.what() << "\n";
  if (const auto* c = dynamic_cast<const ir::ConfigError*>(&e)) {
    for (const auto& p : c->problems()) std::cerr << "  - " << p << "\n";
  }
  if (const auto* v = dynamic_cast<const ir::ValidationFailure*>(&e)) {
    for (const auto& i : v->issues()) {
      std::cerr << "  - [" << i.index << "] " << i.reason << ": " << v->derived().at(i.index).text << "\n";
    }
  }
}

ir::UtteranceSpec parse_spec(const std::string& s) {
  ir::UtteranceSpec spec;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  if (!(in >> spec.seeds >> c1 >> spec.variability >> c2 >> spec.paraphrase) || c1 != ',' || c2 != ',') {
    throw ir::ConfigError({"spec must look like a,b,c, got '" + s + "'"});
  }
  spec.validate();
  return spec;
}

std::unique_ptr<ir::ActionSink> make_sink(const std::string& target) {
  if (target == "stdout") return std::make_unique<ir::StreamSink>(std::cout);
  if (target.rfind("file:", 0) == 0) return std::make_unique<ir::FileSink>(target.substr(5));
  if (target.rfind("http:", 0) == 0 || target.rfind("https:", 0) == 0) {
    return std::make_unique<ir::HttpSink>(ir::HttpSinkConfig{target});
  }
  throw ir::ConfigError({"sink must be stdout, file:<path> or an http(s) URL, got '" + target + "'"});
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ir::Error(ir::ErrorCode::kIo, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ir::Error(ir::ErrorCode::kParse, path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic intent router for 5G core management requests"};
  app.require_subcommand(1);

  // eval
  auto* eval = app.add_subcommand("eval", "Run an experiment family and write JSON/CSV/text reports");
  std::string experiment, config_path, out_dir;
  bool allow_remote = false;
  eval->add_option("--experiment", experiment, "utterance|diversity|encoder|comparison|quantization")->required();
  eval->add_option("--config", config_path, "Experiment config JSON")->required();
  eval->add_option("--out", out_dir, "Output directory (defaults to output_dir of the config)");
  eval->add_flag("--allow-remote", allow_remote, "Permit remote encoders and chat endpoints");

  // route
  auto* route = app.add_subcommand("route", "Route one or more texts and optionally dispatch actions");
  std::vector<std::string> texts;
  std::string routes_path, sink_target;
  route->add_option("--text", texts, "Text to route (repeatable)")->required();
  route->add_option("--routes", routes_path, "Route-set JSON (defaults to the built-in routes)");
  route->add_option("--dispatch", sink_target, "stdout, file:<path> or http(s)://url");

  // routes
  auto* routes = app.add_subcommand("routes", "Write a route-set JSON");
  std::string routes_corpus, routes_out, routes_spec = "0,0,0";
  std::uint64_t routes_seed = 42;
  std::size_t routes_dim = 512;
  bool routes_tune = false;
  routes->add_option("--corpus", routes_corpus, "Corpus to draw utterances from");
  routes->add_option("--spec", routes_spec, "Utterance spec a,b,c")->capture_default_str();
  routes->add_option("--seed", routes_seed, "Selection seed")->capture_default_str();
  routes->add_option("--dim", routes_dim, "Reference encoder dimension")->capture_default_str();
  routes->add_flag("--tune", routes_tune, "Fit thresholds on the seed prompts not used as utterances");
  routes->add_option("--out", routes_out, "Output path (stdout when omitted)");

  // corpus
  auto* corpus = app.add_subcommand("corpus", "Generate or inspect a prompt corpus");
  corpus->require_subcommand(1);
  auto* generate = corpus->add_subcommand("generate", "Synthesize seeds and derive variability/paraphrase prompts");
  std::string gen_out, llm_endpoint, llm_model;
  std::uint64_t gen_seed = 42;
  std::size_t per_route = 30;
  generate->add_option("--out", gen_out, "Output JSONL path")->required();
  generate->add_option("--seed", gen_seed, "Synthesis seed")->capture_default_str();
  generate->add_option("--per-route", per_route, "Seeds per route")->capture_default_str();
  generate->add_option("--llm-endpoint", llm_endpoint, "Chat endpoint for variant generation (rule-based when omitted)");
  generate->add_option("--llm-model", llm_model, "Chat model name");
  auto* stats = corpus->add_subcommand("stats", "Counts per label and variant");
  std::string stats_path;
  stats->add_option("--corpus", stats_path, "Corpus JSONL")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*eval) {
      const auto kind = ir::parse_experiment_kind(experiment);
      if (!kind) throw ir::ConfigError({"unknown experiment '" + experiment + "'"});
      auto config = ir::load_experiment_config(config_path);
      if (allow_remote) config.allow_remote = true;
      if (!out_dir.empty()) config.output_dir = out_dir;
      config.validate(*kind);
      const auto run = ir::run_experiment(*kind, config);
      for (const auto& p : ir::write_reports(run, config.output_dir)) std::cerr << "wrote " << p.string() << "\n";
      std::cout << ir::render_table(run);
      return kOk;
    }

    if (*route) {
      ir::RouteSet set;
      if (routes_path.empty()) {
        set.routes = ir::builtin_routes();
      } else {
        set = ir::route_set_from_json(read_json(routes_path));
      }
      const auto router = ir::Router::build(set.routes, ir::make_encoder(set.encoder), set.top_k);
      std::unique_ptr<ir::ActionSink> sink;
      std::optional<ir::ActionRegistry> registry;
      if (!sink_target.empty()) {
        sink = make_sink(sink_target);
        registry = ir::ActionRegistry::from_routes(router.routes());
        registry->check_covers(router);
      }
      for (const auto& text : texts) {
        const auto decision = router.route_query(text);
        if (!sink) {
          nlohmann::ordered_json j{{"text", text},
                                   {"route", std::string(decision.route_name())},
                                   {"score", decision.score},
                                   {"elapsed_us", decision.elapsed.count()}};
          for (const auto& [name, score] : decision.per_route_scores) j["scores"][name] = score;
          std::cout << j.dump() << "\n";
          continue;
        }
        const auto result = ir::dispatch(decision, *registry);
        if (const auto* none = std::get_if<ir::NoAction>(&result)) {
          std::cerr << "no action: best score " << none->best_score << " ("
                    << none->nearest_route.value_or("-") << ")\n";
        } else {
          const auto receipt = sink->emit(std::get<ir::ActionRequest>(result));
          std::cerr << "delivered " << receipt.correlation_id << " via " << receipt.sink << "\n";
        }
      }
      return kOk;
    }

    if (*routes) {
      ir::RouteSet set;
      set.encoder.dim = routes_dim;
      set.routes = ir::builtin_routes();
      if (!routes_corpus.empty()) {
        const auto spec = parse_spec(routes_spec);
        const auto c = ir::load_corpus(routes_corpus);
        auto router = ir::compose_router(c, spec, ir::make_encoder(set.encoder), routes_seed, set.top_k);
        if (routes_tune) {
          const std::vector<ir::UtteranceSpec> specs{spec};
          const ir::ExperimentData data(c, specs, 2, routes_seed);
          std::vector<ir::LabeledPrompt> train;
          for (auto i : data.evaluated()) train.push_back(data.pool()[i]);
          router = router.with_thresholds(ir::fit_thresholds(router, train));
        }
        set = ir::route_set_of(router);
      }
      const std::string doc = ir::to_json(set).dump(2) + "\n";
      if (routes_out.empty()) {
        std::cout << doc;
      } else {
        std::ofstream(routes_out) << doc;
      }
      return kOk;
    }

    if (*generate) {
      const auto seeds = ir::synthesize_seed_prompts(gen_seed, per_route);
      std::unique_ptr<ir::ChatClient> client;
      std::unique_ptr<ir::VariantGenerator> generator;
      if (!llm_endpoint.empty()) {
        client = std::make_unique<ir::ChatClient>(ir::ChatClientConfig{llm_endpoint, llm_model});
        generator = std::make_unique<ir::LlmVariantGenerator>(*client);
      } else {
        generator = std::make_unique<ir::RuleBasedVariantGenerator>();
      }
      const auto c = ir::build_corpus(seeds, *generator);
      ir::save_corpus(c, gen_out);
      std::cerr << "wrote " << c.size() << " prompts to " << gen_out << "\n";
      return kOk;
    }

    if (*stats) {
      const auto c = ir::load_corpus(stats_path);
      std::cout << "prompts: " << c.size() << "\n";
      for (auto v : {ir::Variant::kBase, ir::Variant::kSeed, ir::Variant::kVariability, ir::Variant::kParaphrase}) {
        const auto counts = c.count_by_label(v);
        if (counts.empty()) continue;
        std::cout << ir::to_string(v) << ":\n";
        for (const auto& [label, n] : counts) std::cout << "  " << label << ": " << n << "\n";
      }
      return kOk;
    }
  } catch (const ir::Error& e) {
    report_error(e);
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}
