#include <benchmark/benchmark.h>

#include "intent_router/corpus.hpp"
#include "intent_router/embedding.hpp"
#include "intent_router/experiments.hpp"
#include "intent_router/tuning.hpp"

using namespace intent_router;

namespace {

const Corpus& corpus() {
  static const Corpus c = load_corpus(std::string(INTENT_ROUTER_DATA_DIR) + "/corpus.jsonl");
  return c;
}

std::shared_ptr<const Encoder> encoder(std::size_t dim) {
  EncoderDescriptor d;
  d.dim = dim;
  return make_encoder(d);
}

void BM_ReferenceEncode(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const std::string text = "Adjust the configuration parameters of net-7 in downtown Manhattan to enhance throughput.";
  for (auto _ : state) benchmark::DoNotOptimize(reference_encode(text, dim));
}
BENCHMARK(BM_ReferenceEncode)->Arg(64)->Arg(512)->Arg(4096);

void BM_RouteQuery(benchmark::State& state) {
  const auto spec = UtteranceSpec{static_cast<int>(state.range(0)), static_cast<int>(state.range(0)),
                                  static_cast<int>(state.range(0))};
  const auto router = compose_router(corpus(), spec, encoder(512), 42);
  const auto seeds = corpus().seeds();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(router.route_query(seeds[i++ % seeds.size()].text));
  }
  state.SetLabel(spec.label());
}
BENCHMARK(BM_RouteQuery)->Arg(0)->Arg(5)->Arg(15)->Unit(benchmark::kMicrosecond);

void BM_FitThresholds(benchmark::State& state) {
  const auto router = compose_router(corpus(), {15, 15, 15}, encoder(512), 42);
  const auto seeds = corpus().seeds();
  const auto table = score_prompts(router, seeds);
  for (auto _ : state) benchmark::DoNotOptimize(fit_thresholds(table, {}, TuningOptions{}));
}
BENCHMARK(BM_FitThresholds)->Unit(benchmark::kMillisecond);

void BM_RunCell(benchmark::State& state) {
  const auto config = experiment_preset(ExperimentKind::kUtterance, "unused");
  const std::vector<UtteranceSpec> specs = {{15, 15, 15}};
  const ExperimentData data(corpus(), specs, 5, 42);
  const auto enc = encoder(512);
  for (auto _ : state) benchmark::DoNotOptimize(run_cell(data, specs[0], enc, config));
}
BENCHMARK(BM_RunCell)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
