#include <benchmark/benchmark.h>

#include "linkbound/bounds.hpp"
#include "linkbound/samplers.hpp"
#include "linkbound/simulate.hpp"

using namespace linkbound;

static void BM_Levenshtein(benchmark::State& state) {
  const auto& names = StringUniverse::bundled_names();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(levenshtein(names.value(i % 20), names.value((i * 7 + 3) % 20)));
    ++i;
  }
}
BENCHMARK(BM_Levenshtein);

static void BM_ExactPosteriors(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto d = generate_point(ModelKind::categorical, {.entities = N, .beta = 0.6, .fields = 3}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(exact_posteriors(d.model, d.records, d.latents));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(N));
}
BENCHMARK(BM_ExactPosteriors)->RangeMultiplier(4)->Range(16, 256)->Complexity();

static void BM_GibbsSweeps(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto d = generate_point(ModelKind::categorical, {.entities = N, .beta = 0.6, .fields = 3}, 2);
  SamplerConfig config{.iterations = 100, .seed = 3};
  for (auto _ : state) {
    std::size_t seen = 0;
    gibbs_run(d.model, d.records, d.latents, initial_state(d.model, d.records, d.latents, config.mode, 4),
              config, [&](const ChainState& s) { seen += s.linkage[0]; });
    benchmark::DoNotOptimize(seen);
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_GibbsSweeps)->Arg(50)->Arg(200);

static void BM_KappaBound(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto d = generate_point(ModelKind::string, {.entities = N, .beta = 0.6, .fields = 3}, 5);
  for (auto _ : state) benchmark::DoNotOptimize(kappa_bound(d.model, d.latents, N));
}
BENCHMARK(BM_KappaBound)->Arg(100)->Arg(500);

static void BM_GammaBound(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const auto d = generate_point(ModelKind::categorical, {.entities = N, .beta = 0.6, .fields = 3}, 6);
  for (auto _ : state) benchmark::DoNotOptimize(gamma_bound(d.model, d.latents, N));
}
BENCHMARK(BM_GammaBound)->Arg(100)->Arg(500);
BENCHMARK_MAIN();
