#include "stormrisk/synth.hpp"

#include <algorithm>
#include <cmath>

#include "stormrisk/errors.hpp"
#include "stormrisk/fragility.hpp"
#include "stormrisk/mathstat.hpp"
#include "stormrisk/rng.hpp"

namespace stormrisk {

namespace {

struct RegionSeed {
  const char* name;
  double lat;
  double lon;
};

// Island utility operating divisions with approximate center coordinates.
constexpr RegionSeed kRegions[] = {
    {"Ponce", 18.01, -66.61},   {"Mayaguez", 18.20, -67.14}, {"Arecibo", 18.43, -66.72},
    {"Bayamon", 18.38, -66.15}, {"Carolina", 18.39, -65.96}, {"Caguas", 18.23, -66.04},
    {"SanJuan", 18.42, -66.07},
};

struct RegionFrag {
  const char* name;
  double lambda;
  double beta;
};

constexpr RegionFrag kRegionFragility[] = {
    {"Ponce", 4.7084, 0.4379},   {"Mayaguez", 4.4057, 0.2061}, {"Caguas", 4.1715, 0.2217},
    {"Arecibo", 5.0150, 0.8574}, {"Bayamon", 4.4308, 0.3012},  {"Carolina", 4.2666, 0.2947},
    {"SanJuan", 4.4443, 0.4226},
};

// RNG stream ids within the synth tag space.
enum SynthStream : std::uint32_t {
  kStreamCenters = 1,
  kStreamPoles = 2,
  kStreamLoads = 3,
  kStreamCounts = 4,
};

double clampd(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

}  // namespace

RegionFragilityTable default_fragility_table() {
  RegionFragilityTable table;
  for (const auto& r : kRegionFragility) table.set(r.name, {r.lambda, r.beta});
  return table;
}

Network synth_network(const SynthParams& params) {
  if (params.n_feeders < 1 || params.n_regions < 1)
    throw InputError(Errc::invalid_config, "synth needs n_feeders >= 1 and n_regions >= 1");

  Network net;
  net.bbox = params.bbox;
  net.has_bbox = true;

  SynthRng centers(params.seed, kStreamCenters);
  std::vector<LatLon> region_centers;
  for (int r = 0; r < params.n_regions; ++r) {
    if (r < static_cast<int>(std::size(kRegions))) {
      net.regions.emplace_back(kRegions[r].name);
      region_centers.push_back({kRegions[r].lat, kRegions[r].lon});
    } else {
      net.regions.push_back("Region" + std::to_string(r + 1));
      region_centers.push_back({centers.uniform(params.bbox.lat_min + 0.1, params.bbox.lat_max - 0.1),
                                centers.uniform(params.bbox.lon_min + 0.1, params.bbox.lon_max - 0.1)});
    }
  }

  SynthRng poles(params.seed, kStreamPoles);
  SynthRng loads(params.seed, kStreamLoads);
  SynthRng counts(params.seed, kStreamCounts);

  const double lat_margin = 0.02;
  double load_sum = 0.0;
  net.feeders.reserve(params.n_feeders);
  for (int k = 0; k < params.n_feeders; ++k) {
    Feeder f;
    f.id = "F" + std::to_string(k + 1);
    f.substation_id = "S" + std::to_string(k / 3 + 1);
    const int region = k % params.n_regions;
    f.region = net.regions[region];

    const LatLon c = region_centers[region];
    const double centroid_lat =
        clampd(c.lat + 0.10 * norm_ppf(poles.uniform01()), params.bbox.lat_min + lat_margin,
               params.bbox.lat_max - lat_margin);
    const double centroid_lon =
        clampd(c.lon + 0.12 * norm_ppf(poles.uniform01()), params.bbox.lon_min + lat_margin,
               params.bbox.lon_max - lat_margin);

    const int n_poles = 4 + static_cast<int>(counts.uniform_int(17));
    for (int p = 0; p < n_poles; ++p) {
      const double lat = clampd(centroid_lat + 0.012 * norm_ppf(poles.uniform01()),
                                params.bbox.lat_min, params.bbox.lat_max);
      const double lon = clampd(centroid_lon + 0.012 * norm_ppf(poles.uniform01()),
                                params.bbox.lon_min, params.bbox.lon_max);
      f.poles.push_back({lat, lon});
    }

    f.load_mw = std::exp(0.8 * norm_ppf(loads.uniform01()));
    load_sum += f.load_mw;
    net.feeders.push_back(std::move(f));
  }

  const double scale = params.total_load_mw / load_sum;
  for (auto& f : net.feeders) f.load_mw *= scale;
  return net;
}

TcTrack synth_track(const SynthParams& params) {
  const UnixTime t0 = params.t_start;
  const std::int64_t d = params.duration_s;
  TcTrack track;
  track.points = {
      {t0, 16.20, -64.90, 28.0, 45.0},
      {t0 + d * 3 / 8, 17.00, -65.80, 33.0, 38.0},
      {t0 + d * 3 / 4, 17.80, -66.70, 37.0, 32.0},
      {t0 + d, 18.35, -67.40, 38.6, 30.0},
  };
  validate_track(track);
  return track;
}

std::map<std::string, std::vector<double>> regional_exposure_mph(
    const Network& net, const WindFieldSeries& wind, const std::vector<UnixTime>& grid) {
  std::map<std::string, std::vector<double>> exposure;
  std::map<std::string, double> region_load;
  for (const auto& r : net.regions) {
    exposure[r].assign(grid.size(), 0.0);
    region_load[r] = 0.0;
  }
  exposure["total"].assign(grid.size(), 0.0);
  double total_load = 0.0;

  for (const auto& f : net.feeders) {
    region_load[f.region] += f.load_mw;
    total_load += f.load_mw;
    double running_max = 0.0;
    for (std::size_t t = 0; t < grid.size(); ++t) {
      running_max = std::max(running_max, feeder_design_wind(f, wind, grid[t]) * kMphPerMs);
      exposure[f.region][t] += f.load_mw * running_max;
      exposure["total"][t] += f.load_mw * running_max;
    }
  }
  for (auto& [region, series] : exposure) {
    const double denom = region == "total" ? total_load : region_load[region];
    for (double& v : series) v = denom > 0.0 ? v / denom : 0.0;
  }
  return exposure;
}

std::map<std::string, ObservedOutageSeries> synth_observed_simulate(
    const Network& net, const RegionFragilityTable& fragility, const WindFieldSeries& wind,
    const SimulationConfig& cfg) {
  SimulationConfig run_cfg = cfg;
  run_cfg.method = Method::hrsra;
  run_cfg.store_regional = true;
  const OutageEnsemble ens = run_hrsra(net, fragility, wind, run_cfg);

  std::map<std::string, ObservedOutageSeries> out;
  auto& total = out["total"];
  total.region = "total";
  total.timestamps = ens.timestamps;
  total.outage_pct.assign(ens.timestamps.size(), 0.0);
  for (int j = 0; j < ens.n_runs; ++j)
    for (std::size_t t = 0; t < ens.timestamps.size(); ++t)
      total.outage_pct[t] += ens.at(j, t);
  for (double& v : total.outage_pct) v /= ens.n_runs;

  for (std::size_t r = 0; r < ens.regions.size(); ++r) {
    auto& series = out[ens.regions[r]];
    series.region = ens.regions[r];
    series.timestamps = ens.timestamps;
    series.outage_pct.assign(ens.timestamps.size(), 0.0);
    for (int j = 0; j < ens.n_runs; ++j)
      for (std::size_t t = 0; t < ens.timestamps.size(); ++t)
        series.outage_pct[t] += ens.regional_at(j, r, t);
    for (double& v : series.outage_pct) v /= ens.n_runs;
  }
  return out;
}

std::map<std::string, ObservedOutageSeries> synth_observed_fragility_exact(
    const Network& net, const RegionFragilityTable& fragility, const WindFieldSeries& wind,
    const std::vector<UnixTime>& grid) {
  const auto exposure = regional_exposure_mph(net, wind, grid);

  std::map<std::string, double> region_load;
  double total_load = 0.0;
  for (const auto& f : net.feeders) {
    region_load[f.region] += f.load_mw;
    total_load += f.load_mw;
  }

  std::map<std::string, ObservedOutageSeries> out;
  for (const auto& region : net.regions) {
    auto& series = out[region];
    series.region = region;
    series.timestamps = grid;
    const auto& w = exposure.at(region);
    for (std::size_t t = 0; t < grid.size(); ++t)
      series.outage_pct.push_back(100.0 * fragility_prob(w[t], fragility.at(region)));
  }
  auto& total = out["total"];
  total.region = "total";
  total.timestamps = grid;
  total.outage_pct.assign(grid.size(), 0.0);
  for (const auto& region : net.regions) {
    const double share = region_load[region] / total_load;
    for (std::size_t t = 0; t < grid.size(); ++t)
      total.outage_pct[t] += share * out[region].outage_pct[t];
  }
  return out;
}

}  // namespace stormrisk
