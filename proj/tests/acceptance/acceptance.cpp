// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "intent_router/corpus.hpp"
#include "intent_router/error.hpp"
#include "intent_router/experiments.hpp"
#include "intent_router/remote_encoder.hpp"
#include "intent_router/rng.hpp"
#include "intent_router/tuning.hpp"
#include "mock_embeddings.hpp"
#include "oracles.hpp"

using namespace intent_router;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = fs::path(INTENT_ROUTER_DATA_DIR) / "corpus.jsonl";

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!v.pass) ++failures;
  std::printf("%s  [%2d] %s: %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", id, title.c_str(), v.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string pct(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * x);
  return buf;
}

const ExperimentResult& cell(const std::vector<ExperimentResult>& rs, const UtteranceSpec& spec,
                             const std::string& encoder = {}) {
  for (const auto& r : rs) {
    if (r.spec == spec && (encoder.empty() || r.encoder == encoder)) return r;
  }
  throw Error(ErrorCode::kInvalidArgument, "missing cell " + spec.label());
}

double post_test(const std::vector<ExperimentResult>& rs, const UtteranceSpec& s) {
  return cell(rs, s).post_test.mean_fold_accuracy();
}

// Lazily computed preset runs shared by several criteria.
struct Runs {
  std::optional<std::vector<ExperimentResult>> utterance, diversity, encoder;
  std::optional<std::vector<ComparisonResult>> comparison;

  const std::vector<ExperimentResult>& get_utterance() {
    if (!utterance) utterance = run_utterance_experiment(experiment_preset(ExperimentKind::kUtterance, kCorpus));
    return *utterance;
  }
  const std::vector<ExperimentResult>& get_diversity() {
    if (!diversity) diversity = run_diversity_experiment(experiment_preset(ExperimentKind::kDiversity, kCorpus));
    return *diversity;
  }
  const std::vector<ExperimentResult>& get_encoder() {
    if (!encoder) encoder = run_encoder_experiment(experiment_preset(ExperimentKind::kEncoder, kCorpus));
    return *encoder;
  }
  const std::vector<ComparisonResult>& get_comparison() {
    if (!comparison) comparison = run_comparison_experiment(experiment_preset(ExperimentKind::kComparison, kCorpus));
    return *comparison;
  }
};

Verdict builtin_route_fidelity() {
  const std::vector<std::pair<std::string, std::string>> golden = {
      {"Deployment Intent", "Deploy a new network in [region] with the following specifications..."},
      {"Modification Intent",
       "Modify the existing [network] to address the performance issues caused by high loading..."},
      {"Performance Assurance Intent",
       "Ensure that the deployed network can support a [QoS Level] application with the following requirements..."},
      {"Intent Report Request", "Summarize the results of the previous request."},
      {"Intent Feasibility Check",
       "Before proceeding, ensure that capacity exists in [region] to perform the required changes."},
      {"Regular Notification Request", "Notify me of the status of [network] every [frequency]."},
  };
  const auto routes = builtin_routes();
  if (routes.size() != golden.size()) return {false, std::to_string(routes.size()) + " routes"};
  for (std::size_t i = 0; i < golden.size(); ++i) {
    if (routes[i].name != golden[i].first) return {false, "route " + std::to_string(i) + " name " + routes[i].name};
    if (routes[i].utterances.empty() || routes[i].utterances[0] != golden[i].second) {
      return {false, routes[i].name + " base utterance differs"};
    }
    if (routes[i].threshold != 0.5) return {false, routes[i].name + " threshold not 0.5"};
  }
  return {true, "6 routes, names and base utterances byte-identical, thresholds 0.5"};
}

Verdict non_regression(Runs& runs) {
  std::size_t cells = 0, ok = 0;
  std::string worst;
  for (const auto* rs : {&runs.get_utterance(), &runs.get_diversity(), &runs.get_encoder()}) {
    for (const auto& r : *rs) {
      for (std::size_t f = 0; f < r.pre_train.per_fold.size(); ++f) {
        ++cells;
        if (r.post_train.per_fold[f] >= r.pre_train.per_fold[f]) {
          ++ok;
        } else if (worst.empty()) {
          worst = r.encoder + " " + r.spec.label() + " fold " + std::to_string(f);
        }
      }
    }
  }
  std::string detail = std::to_string(ok) + "/" + std::to_string(cells) +
                       " (preset, spec, fold) cells with post-train >= pre-train";
  if (!worst.empty()) detail += "; first regression " + worst;
  return {ok == cells && cells > 0, detail};
}

Verdict utterance_scaling(Runs& runs) {
  const auto& rs = runs.get_utterance();
  const double lo = post_test(rs, {0, 0, 0});
  const double hi = post_test(rs, {15, 15, 15});
  return {hi - lo >= 0.10, "test (0,0,0) " + pct(lo) + " -> (15,15,15) " + pct(hi) + ", gain " +
                               pct(hi - lo) + " (need >= 10.0%)"};
}

Verdict diversity_direction(Runs& runs) {
  const auto& rs = runs.get_diversity();
  const double a = post_test(rs, {5, 0, 0});
  const double b = post_test(rs, {5, 5, 0});
  const double c = post_test(rs, {5, 0, 5});
  const double d = post_test(rs, {5, 5, 5});
  // Equal-within-a-sample counts as "approximately >=" for (5,0,5) vs (5,0,0).
  const double one_sample = 1.0 / static_cast<double>(cell(rs, {5, 0, 0}).post_test.n_samples);
  const bool pass = d >= b && d >= c && c >= a - one_sample && d - a > 0.0;
  std::ostringstream s;
  s << "post-tuning test (5,0,0) " << pct(a) << ", (5,5,0) " << pct(b) << ", (5,0,5) " << pct(c) << ", (5,5,5) "
    << pct(d) << "; pre-tuning test " << pct(cell(rs, {5, 0, 0}).pre_test.mean_fold_accuracy()) << ", "
    << pct(cell(rs, {5, 5, 0}).pre_test.mean_fold_accuracy()) << ", "
    << pct(cell(rs, {5, 0, 5}).pre_test.mean_fold_accuracy()) << ", "
    << pct(cell(rs, {5, 5, 5}).pre_test.mean_fold_accuracy());
  return {pass, s.str()};
}

Verdict gap_shrinkage(Runs& runs) {
  const auto& rs = runs.get_utterance();
  const auto gap = [&](const UtteranceSpec& s) {
    const auto& r = cell(rs, s);
    return std::abs(r.post_train.mean_fold_accuracy() - r.post_test.mean_fold_accuracy());
  };
  const double g0 = gap({0, 0, 0});
  const double g15 = gap({15, 15, 15});
  return {g15 < g0, "post-tuning |train - test| gap (0,0,0) " + pct(g0) + " -> (15,15,15) " + pct(g15)};
}

Verdict latency_ratio(Runs& runs) {
  const auto& clean = runs.get_comparison().at(0).report;
  std::ostringstream s;
  s << "n=" << clean.n_samples << ", LLM median " << clean.llm.median_us / 1000.0 << " ms, router median "
    << clean.router.median_us / 1000.0 << " ms, ratio " << std::llround(clean.ratio) << "x (need >= 50x, router < 10 ms)";
  if (!clean.llm_failures.empty()) s << ", " << clean.llm_failures.size() << " LLM failures";
  return {clean.ratio >= 50.0 && clean.router.median_us < 10000.0 && clean.llm_failures.empty(), s.str()};
}

Verdict hallucination(Runs& runs) {
  const auto& cmp = runs.get_comparison();
  const auto& clean = cmp.at(0).report;
  const auto& faulty = cmp.at(1).report;
  const double drop = clean.llm_accuracy() - faulty.llm_accuracy();
  const bool router_same = clean.router_correct == faulty.router_correct && clean.n_samples == faulty.n_samples;
  std::ostringstream s;
  s << "LLM accuracy clean " << pct(clean.llm_accuracy()) << " -> hallucinating " << pct(faulty.llm_accuracy())
    << " (drop " << pct(drop) << ", " << faulty.llm_hallucinated << " near-miss labels); router "
    << pct(clean.router_accuracy()) << " vs " << pct(faulty.router_accuracy());
  return {drop >= 0.25 && router_same, s.str()};
}

Verdict oracle_equivalence() {
  const auto corpus = load_corpus(kCorpus);
  const auto names = builtin_route_names();
  EncoderDescriptor desc;
  desc.dim = 64;
  const auto enc = make_encoder(desc);
  DeterministicRng rng(20240501);

  std::map<std::string, std::vector<double>> memo;
  const auto emb = [&](const std::string& t) -> const std::vector<double>& {
    auto it = memo.find(t);
    if (it == memo.end()) it = memo.emplace(t, oracle::reference_embedding(t, 64)).first;
    return it->second;
  };
  const auto random_text = [&](const std::string& label) {
    const auto idx = corpus.indices_of(label, static_cast<Variant>(1 + rng.below(3)));
    return corpus.prompts()[idx[rng.below(idx.size())]].text;
  };
  const auto random_routes = [&](std::vector<std::string> labels) {
    std::vector<Route> routes;
    for (const auto& l : labels) {
      Route r{l, {}};
      const auto n = 1 + rng.below(8);
      for (std::size_t i = 0; i < n; ++i) r.utterances.push_back(random_text(l));
      routes.push_back(r);
    }
    return routes;
  };

  double max_err = 0.0;
  std::size_t decision_mismatch = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> labels = names;
    rng.shuffle(std::span(labels));
    labels.resize(1 + rng.below(labels.size()));
    const auto routes = random_routes(labels);
    const std::size_t top_k = 1 + rng.below(6);
    const auto router = Router::build(routes, enc, top_k);
    const auto query = random_text(names[rng.below(names.size())]);
    const auto decision = router.route_query(query);
    std::vector<double> expected;
    for (const auto& r : routes) {
      std::vector<std::vector<double>> utt;
      for (const auto& u : r.utterances) utt.push_back(emb(u));
      expected.push_back(oracle::route_score(emb(query), utt, top_k));
    }
    for (std::size_t i = 0; i < routes.size(); ++i) {
      max_err = std::max(max_err, std::abs(decision.per_route_scores.at(i).second - expected[i]));
    }
    const int pick = oracle::select(expected, std::vector<double>(routes.size(), 0.5));
    const std::string want = pick < 0 ? std::string(kNoneRoute) : routes[static_cast<std::size_t>(pick)].name;
    if (decision.route_name() != want) ++decision_mismatch;
  }

  std::size_t tuning_mismatch = 0;
  const int instances = 50;
  for (int trial = 0; trial < instances; ++trial) {
    std::vector<std::string> labels = names;
    rng.shuffle(std::span(labels));
    const auto routes = random_routes({labels[0], labels[1]});
    const auto router = Router::build(routes, enc);
    std::vector<LabeledPrompt> train;
    for (int i = 0; i < 30; ++i) {
      const auto& l = labels[rng.below(labels.size())];
      LabeledPrompt p;
      p.text = random_text(l);
      p.label = (l == labels[0] || l == labels[1]) ? l : std::string(kNoneRoute);
      train.push_back(p);
    }
    const auto fitted = fit_thresholds(router, train);
    std::vector<std::vector<double>> scores;
    std::vector<int> truth;
    std::vector<double> obs0, obs1;
    for (const auto& p : train) {
      std::vector<double> s;
      for (const auto& r : routes) {
        std::vector<std::vector<double>> utt;
        for (const auto& u : r.utterances) utt.push_back(emb(u));
        s.push_back(oracle::route_score(emb(p.text), utt, kDefaultTopK));
      }
      obs0.push_back(s[0]);
      obs1.push_back(s[1]);
      scores.push_back(s);
      truth.push_back(p.label == labels[0] ? 0 : p.label == labels[1] ? 1 : -1);
    }
    const std::vector<double> thr = {fitted.at(labels[0]), fitted.at(labels[1])};
    std::size_t hits = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) hits += oracle::select(scores[i], thr) == truth[i];
    const auto best = oracle::best_two_route_hits(scores, truth, oracle::threshold_candidates(obs0, 0.01, 0.5),
                                                  oracle::threshold_candidates(obs1, 0.01, 0.5));
    if (hits != best) ++tuning_mismatch;
  }

  std::ostringstream s;
  s << "50 routers: max |score - oracle| " << max_err << ", " << decision_mismatch << " decision mismatches; "
    << instances - static_cast<int>(tuning_mismatch) << "/" << instances
    << " two-route tunings equal exhaustive-search accuracy";
  return {max_err <= 1e-9 && decision_mismatch == 0 && tuning_mismatch == 0, s.str()};
}

Verdict determinism() {
  const auto c1 = load_corpus(kCorpus);
  const auto c2 = load_corpus(kCorpus);
  const auto specs = default_specs(ExperimentKind::kUtterance);
  const ExperimentData a(c1, specs, 5, 42);
  const ExperimentData b(c2, specs, 5, 42);
  if (a.folds() != b.folds() || a.evaluated() != b.evaluated()) return {false, "fold assignment differs"};

  const auto& folds = a.folds();
  std::set<std::size_t> seen;
  bool blocks_ok = folds.size() == 5;
  for (const auto& f : folds) {
    blocks_ok = blocks_ok && f.size() == 36;
    std::map<std::string, int> per_label;
    for (auto i : f) {
      blocks_ok = blocks_ok && seen.insert(i).second;
      ++per_label[a.pool()[i].label];
    }
    for (const auto& [label, n] : per_label) blocks_ok = blocks_ok && n == 6;
  }
  blocks_ok = blocks_ok && seen.size() == 180;

  const auto config = experiment_preset(ExperimentKind::kUtterance, kCorpus);
  const auto enc = make_encoder(config.encoder());
  const UtteranceSpec spec{5, 5, 5};
  const auto r1 = run_cell(a, spec, enc, config);
  const auto r2 = run_cell(b, spec, enc, config);
  auto j1 = to_json(r1);
  auto j2 = to_json(r2);
  j1.erase("timing");
  j2.erase("timing");
  const bool same = j1 == j2;
  return {blocks_ok && same, std::string(blocks_ok ? "5 disjoint stratified folds of 36 (6 per intent)"
                                                   : "fold blocks malformed") +
                                 (same ? ", identical folds and reports across runs" : ", reports differ")};
}

Verdict remote_parity() {
  const char* live = std::getenv("INTENT_ROUTER_EMBED_ENDPOINT");
  std::optional<MockEmbeddingServer> mock;
  EncoderDescriptor remote;
  remote.kind = EncoderKind::kRemote;
  remote.name = "remote";
  remote.timeout = std::chrono::milliseconds(60000);
  std::string where;
  if (live && *live) {
    remote.endpoint = live;
    const char* model = std::getenv("INTENT_ROUTER_EMBED_MODEL");
    remote.model = model && *model ? model : "text-embedding-3-small";
    where = "live endpoint " + *remote.endpoint;
  } else {
    mock.emplace(64);
    remote.endpoint = mock->endpoint();
    remote.model = "mock-embedding";
    where = "local OpenAI-compatible mock (set INTENT_ROUTER_EMBED_ENDPOINT/_KEY for a live run)";
  }
  auto config = experiment_preset(ExperimentKind::kEncoder, kCorpus);
  config.encoders = {EncoderDescriptor{}, remote};
  config.allow_remote = true;
  const auto results = run_encoder_experiment(config);

  const auto specs = config.specs_for(ExperimentKind::kEncoder);
  bool ok = results.size() == config.encoders.size() * specs.size();
  for (const auto& enc : config.encoders) {
    for (const auto& s : specs) {
      const auto& r = cell(results, s, enc.name);
      const auto j = to_json(r);
      for (const char* phase : {"pre_tuning", "post_tuning"}) {
        for (const char* part : {"train", "test"}) {
          const auto& rep = j.at(phase).at(part);
          const double acc = rep.at("accuracy").get<double>();
          ok = ok && acc >= 0.0 && acc <= 1.0 && rep.at("per_fold").size() == static_cast<std::size_t>(config.k_folds) &&
               rep.at("confusion").size() == 7;
        }
      }
      ok = ok && j.at("fold_thresholds").size() == static_cast<std::size_t>(config.k_folds);
    }
  }
  const auto& last = cell(results, {15, 15, 15}, "remote");
  std::ostringstream s;
  s << results.size() << " encoder x spec cells with pre/post train/test reports via " << where
    << "; remote (15,15,15) post-test " << pct(last.post_test.mean_fold_accuracy());
  return {ok, s.str()};
}

}  // namespace

int main() {
  Runs runs;
  criterion(1, "Built-in route fidelity", builtin_route_fidelity);
  criterion(2, "Tuning non-regression", [&] { return non_regression(runs); });
  criterion(3, "Utterance-scaling direction", [&] { return utterance_scaling(runs); });
  criterion(4, "Diversity direction", [&] { return diversity_direction(runs); });
  criterion(5, "Generalization-gap shrinkage", [&] { return gap_shrinkage(runs); });
  criterion(6, "Latency ratio", [&] { return latency_ratio(runs); });
  criterion(7, "Hallucination degradation", [&] { return hallucination(runs); });
  criterion(8, "Oracle equivalence", oracle_equivalence);
  criterion(9, "Determinism and k-fold", determinism);
  criterion(10, "Remote parity", remote_parity);
  std::printf("%d/10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
