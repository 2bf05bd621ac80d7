#include <benchmark/benchmark.h>

#include "rddg/benchmark_data.hpp"
#include "rddg/coreset.hpp"
#include "rddg/feedback.hpp"
#include "rddg/fidelity.hpp"
#include "rddg/gateway.hpp"
#include "rddg/orchestrator.hpp"
#include "rddg/prompts.hpp"
#include "rddg/rng.hpp"

using namespace rddg;

namespace {

std::vector<double> gaussian_column(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (double& v : out) v = rng.normal();
  return out;
}

void KsStatistic(benchmark::State& state) {
  const auto a = gaussian_column(static_cast<std::size_t>(state.range()), 1);
  const auto b = gaussian_column(static_cast<std::size_t>(state.range()), 2);
  for (auto _ : state) benchmark::DoNotOptimize(ks_statistic(a, b));
  state.SetComplexityN(state.range());
}
BENCHMARK(KsStatistic)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BinnedKl(benchmark::State& state) {
  const auto a = gaussian_column(static_cast<std::size_t>(state.range()), 1);
  const auto b = gaussian_column(static_cast<std::size_t>(state.range()), 2);
  for (auto _ : state) benchmark::DoNotOptimize(kl_divergence_binned(a, b, 50));
}
BENCHMARK(BinnedKl)->RangeMultiplier(4)->Range(64, 16384);

void CorrelationDiffMetrics(benchmark::State& state) {
  const Dataset real = generate_benchmark(BenchmarkName::real_estate,
                                          static_cast<std::size_t>(state.range()), 0);
  const Dataset synth = generate_benchmark(BenchmarkName::real_estate,
                                           static_cast<std::size_t>(state.range()), 1);
  for (auto _ : state) benchmark::DoNotOptimize(correlation_diff_metrics(real, synth));
}
BENCHMARK(CorrelationDiffMetrics)->Range(256, 4096);

void ProbeEpoch(benchmark::State& state) {
  const Dataset train = generate_benchmark(BenchmarkName::real_estate, 800, 0);
  ProbeConfig cfg;
  cfg.epochs = 3;  // minimum; the probe scales linearly in epochs
  for (auto _ : state) benchmark::DoNotOptimize(train_probe(train, cfg));
}
BENCHMARK(ProbeEpoch)->Unit(benchmark::kMillisecond);

void MockBatchGeneration(benchmark::State& state) {
  const Dataset train = generate_benchmark(BenchmarkName::real_estate, 800, 0);
  PipelineConfig cfg;
  const auto codes = make_run_codes(train.schema, cfg);
  MockGateway gateway(train.schema, codes, cfg.mock);
  const auto plan = reference_plan(train, 30);
  gateway.register_reference(train.subset(plan.groups[0]), 15);
  const std::vector<ChatMessage> prompt = {{ChatRole::user, "Generate 15 new samples per class"}};
  for (auto _ : state) benchmark::DoNotOptimize(gateway.complete(prompt));
}
BENCHMARK(MockBatchGeneration);

void ParseGeneratedRows(benchmark::State& state) {
  const Dataset train = generate_benchmark(BenchmarkName::real_estate, 800, 0);
  PipelineConfig cfg;
  const auto codes = make_run_codes(train.schema, cfg);
  MockGateway gateway(train.schema, codes, cfg.mock);
  const auto plan = reference_plan(train, 30);
  gateway.register_reference(train.subset(plan.groups[0]), 50);
  const auto response =
      gateway.complete({{ChatRole::user, "Generate 50 new samples per class"}});
  for (auto _ : state)
    benchmark::DoNotOptimize(parse_generated_rows(response.text, train.schema, codes));
}
BENCHMARK(ParseGeneratedRows);

void FullMockPipeline(benchmark::State& state) {
  const Dataset train = generate_benchmark(BenchmarkName::real_estate, 800, 0);
  PipelineConfig cfg;
  cfg.n_target = 200;
  cfg.coreset_k = 25;
  cfg.probe.epochs = 12;
  cfg.probe.hidden = {16, 8};
  for (auto _ : state) {
    MockGateway gateway(train.schema, make_run_codes(train.schema, cfg), cfg.mock);
    benchmark::DoNotOptimize(run_pipeline(train, cfg, gateway));
  }
}
BENCHMARK(FullMockPipeline)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
