// Synthetic fixtures: island-scale networks, a northwestward storm track,
// and observed-outage series. Stands in for proprietary utility data; scale
// and geography are plausible, nothing is real.
#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "stormrisk/analytics.hpp"
#include "stormrisk/network.hpp"
#include "stormrisk/simulate.hpp"
#include "stormrisk/track.hpp"

namespace stormrisk {

struct SynthParams {
  int n_feeders = 936;
  int n_regions = 7;
  double total_load_mw = 2751.0;
  std::uint64_t seed = 7;
  GeoBox bbox{17.6, 18.8, -67.6, -65.0};
  UnixTime t_start = 1663459200;  // 2022-09-18T00:00:00Z
  std::int64_t duration_s = 16 * 3600;
  std::int64_t dt_s = 600;
};

// Seven named island regions with clustered feeders and lognormal loads that
// are rescaled to sum to total_load_mw exactly. Regions beyond the built-in
// seven are synthesized as RegionN around fresh cluster centers.
Network synth_network(const SynthParams& params);

// Four-point track approaching from the southeast and passing the island's
// southwest corner, peak sustained wind 38.6 m/s. Right side of the motion
// (northeast) faces the island.
TcTrack synth_track(const SynthParams& params);

// Built-in per-region fragility parameters for the seven named regions.
RegionFragilityTable default_fragility_table();

// Load-weighted regional mean of each feeder's running-max design gust, in
// mph, per grid timestamp. Includes a "total" entry over all feeders.
std::map<std::string, std::vector<double>> regional_exposure_mph(
    const Network& net, const WindFieldSeries& wind, const std::vector<UnixTime>& grid);

// Observed series as the mean trajectory of a fresh hrsra ensemble.
std::map<std::string, ObservedOutageSeries> synth_observed_simulate(
    const Network& net, const RegionFragilityTable& fragility, const WindFieldSeries& wind,
    const SimulationConfig& cfg);

// Observed series evaluated directly from the fragility curves on the
// regional exposure: y_r(t) = 100 * F_r(w_r(t)). Calibrating against these
// recovers the generating parameters, which makes them the fixture of choice
// for calibration round-trips.
std::map<std::string, ObservedOutageSeries> synth_observed_fragility_exact(
    const Network& net, const RegionFragilityTable& fragility, const WindFieldSeries& wind,
    const std::vector<UnixTime>& grid);

}  // namespace stormrisk
