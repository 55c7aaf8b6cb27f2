#include <benchmark/benchmark.h>

#include "stormrisk/fragility.hpp"
#include "stormrisk/mathstat.hpp"
#include "stormrisk/rng.hpp"

using namespace stormrisk;

static void BM_PhiloxUniform(benchmark::State& state) {
  std::uint64_t i = 0;
  double acc = 0.0;
  for (auto _ : state) {
    acc += philox::uniform01(42, i++, 7);
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_PhiloxUniform);

static void BM_NormPpf(benchmark::State& state) {
  double p = 0.0001;
  double acc = 0.0;
  for (auto _ : state) {
    acc += norm_ppf(p);
    p += 0.0001;
    if (p >= 1.0) p = 0.0001;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_NormPpf);

static void BM_SampleResistance(benchmark::State& state) {
  const FragilityParams params{4.4443, 0.4226};
  std::uint64_t i = 0;
  double acc = 0.0;
  for (auto _ : state) {
    acc += sample_resistance(philox::uniform01(42, i++, 3), params);
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_SampleResistance);

static void BM_FragilityProb(benchmark::State& state) {
  const FragilityParams params{4.4443, 0.4226};
  double w = 10.0;
  double acc = 0.0;
  for (auto _ : state) {
    acc += fragility_prob(w, params);
    w = w >= 200.0 ? 10.0 : w + 0.01;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_FragilityProb);

BENCHMARK_MAIN();
