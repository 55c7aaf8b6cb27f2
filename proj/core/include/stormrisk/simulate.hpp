// Monte Carlo outage engines.
//
// Two samplers over the same fragility curves:
//   hrsra — converts each feeder's failure probability into a wind-speed
//           resistance threshold drawn once per run; a feeder fails when the
//           gust exceeds its threshold. Immune to sampling frequency.
//   smc   — redraws a uniform variate against the time-varying failure
//           probability at every step; finer time steps accumulate more
//           Bernoulli trials and inflate outages.
//
// Runs are mutually independent and deterministic given the master seed;
// outputs are byte-identical for any worker count.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "stormrisk/network.hpp"
#include "stormrisk/timeparse.hpp"
#include "stormrisk/wind_field.hpp"

namespace stormrisk {

enum class Method { hrsra, smc };

std::string method_name(Method m);
Method method_from_string(const std::string& name);

struct SimulationConfig {
  int n_runs = 10000;
  std::int64_t dt_s = 600;
  UnixTime t_start = 0;
  UnixTime t_end = 0;
  Method method = Method::hrsra;
  std::uint64_t master_seed = 0;
  int threads = 0;             // 0 = hardware concurrency
  bool store_status = false;   // per-run feeder status bit matrices
  bool store_regional = false; // per-region p_fail matrices

  void validate() const;
  // Inclusive grid t_start, t_start+dt, ..., t_end.
  std::vector<UnixTime> time_grid() const;
};

// p_fail is the failed share of system load, in percent of total demand.
struct OutageEnsemble {
  Method method = Method::hrsra;
  std::uint64_t master_seed = 0;
  int n_runs = 0;
  std::vector<UnixTime> timestamps;
  std::vector<double> p_fail;  // n_runs x T, row-major

  // Present when store_regional was set.
  std::vector<std::string> regions;
  std::vector<double> regional_p_fail;  // n_runs x regions x T

  // Present when store_status was set: failure bits (1 = failed), packed
  // per run as T * words_per_step words, feeder i at bit i of its word.
  int n_feeders = 0;
  std::vector<std::vector<std::uint64_t>> status_bits;

  double at(int run, std::size_t t) const { return p_fail[run * timestamps.size() + t]; }
  double regional_at(int run, std::size_t region, std::size_t t) const {
    return regional_p_fail[(run * regions.size() + region) * timestamps.size() + t];
  }
  bool failed_at(int run, std::size_t t, int feeder) const;

  // Long-form CSV run,timestamp,p_fail_pct + summary.json (+ regional.csv).
  void save(const std::filesystem::path& dir) const;
  static OutageEnsemble load(const std::filesystem::path& dir);
};

OutageEnsemble run_hrsra(const Network& net, const RegionFragilityTable& fragility,
                         const WindFieldSeries& wind, const SimulationConfig& cfg);
OutageEnsemble run_smc(const Network& net, const RegionFragilityTable& fragility,
                       const WindFieldSeries& wind, const SimulationConfig& cfg);
// Dispatches on cfg.method.
OutageEnsemble run_simulation(const Network& net, const RegionFragilityTable& fragility,
                              const WindFieldSeries& wind, const SimulationConfig& cfg);

}  // namespace stormrisk
