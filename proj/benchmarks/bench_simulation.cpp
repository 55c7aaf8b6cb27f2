// Island-scale scenario benchmarks: wind raster generation, gust queries,
// and both Monte Carlo engines.
#include <benchmark/benchmark.h>

#include "stormrisk/simulate.hpp"
#include "stormrisk/synth.hpp"
#include "stormrisk/track.hpp"
#include "stormrisk/wind_field.hpp"

using namespace stormrisk;

namespace {

struct Scenario {
  SynthParams params;
  Network net;
  RegionFragilityTable table;
  TcTrack track;
  WindFieldSeries wind;

  Scenario()
      : net(synth_network(params)),
        table(default_fragility_table()),
        track(synth_track(params)),
        wind(generate_wind_fields(track, params.bbox, 0.05, 600)) {}
};

const Scenario& scenario() {
  static Scenario s;
  return s;
}

SimulationConfig engine_cfg(Method method, int n_runs) {
  const auto& s = scenario();
  SimulationConfig cfg;
  cfg.n_runs = n_runs;
  cfg.dt_s = 600;
  cfg.t_start = s.wind.timestamps().front();
  cfg.t_end = s.wind.timestamps().back();
  cfg.method = method;
  cfg.master_seed = 42;
  cfg.threads = 1;
  return cfg;
}

}  // namespace

static void BM_GenerateWindFields(benchmark::State& state) {
  const auto& s = scenario();
  for (auto _ : state) {
    const WindFieldSeries wind = generate_wind_fields(s.track, s.params.bbox, 0.05, 600);
    benchmark::DoNotOptimize(wind.n_lat());
  }
}
BENCHMARK(BM_GenerateWindFields)->Unit(benchmark::kMillisecond);

static void BM_GustQuery(benchmark::State& state) {
  const auto& s = scenario();
  double lat = 17.9, lon = -66.8;
  double acc = 0.0;
  for (auto _ : state) {
    acc += s.wind.gust_at({lat, lon}, s.wind.timestamps()[40]);
    lat += 0.003;
    if (lat > 18.6) lat = 17.9;
    lon += 0.007;
    if (lon > -65.2) lon = -66.8;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_GustQuery);

static void BM_RunHrsra(benchmark::State& state) {
  const auto& s = scenario();
  const SimulationConfig cfg = engine_cfg(Method::hrsra, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const OutageEnsemble ens = run_hrsra(s.net, s.table, s.wind, cfg);
    benchmark::DoNotOptimize(ens.p_fail.data());
  }
  state.SetItemsProcessed(state.iterations() * cfg.n_runs);
}
BENCHMARK(BM_RunHrsra)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_RunSmc(benchmark::State& state) {
  const auto& s = scenario();
  const SimulationConfig cfg = engine_cfg(Method::smc, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    const OutageEnsemble ens = run_smc(s.net, s.table, s.wind, cfg);
    benchmark::DoNotOptimize(ens.p_fail.data());
  }
  state.SetItemsProcessed(state.iterations() * cfg.n_runs);
}
BENCHMARK(BM_RunSmc)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
