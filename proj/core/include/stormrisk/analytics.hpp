// Ensemble-versus-observation analytics: average RMSE, empirical quantile
// bands, fragility calibration, and the temporal-resolution sweep.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "stormrisk/network.hpp"
#include "stormrisk/simulate.hpp"
#include "stormrisk/track.hpp"

namespace stormrisk {

struct ObservedOutageSeries {
  std::string region = "total";
  std::vector<UnixTime> timestamps;  // strictly increasing
  std::vector<double> outage_pct;    // [0, 100]
};

// CSV schema: timestamp_iso8601,region,outage_pct. Returns one series per
// region label; the system-level series uses the label "total".
std::map<std::string, ObservedOutageSeries> parse_observed(const std::filesystem::path& path);
void save_observed(const std::map<std::string, ObservedOutageSeries>& series,
                   const std::filesystem::path& path);

// Mean over runs of the per-run RMSE against the observed trace, in
// percentage points:  (1/N) * sum_j sqrt((1/T) * sum_t (obs(t) - p_j(t))^2).
// The observed series is resampled step-and-hold onto the ensemble grid when
// the ensemble is coarser; a finer ensemble raises TimestampMismatch.
double avg_rmse(const ObservedOutageSeries& observed, const OutageEnsemble& ensemble);

// Nearest-rank empirical quantile: sorted value at index round(level*(n-1)).
double nearest_rank_quantile(std::vector<double> values, double level);

struct BandSeries {
  std::vector<UnixTime> timestamps;
  std::vector<double> mean;
  std::vector<double> levels;
  std::vector<std::vector<double>> quantiles;  // one trace per level
  std::vector<std::string> warnings;

  const std::vector<double>& level_trace(double level) const;
};

BandSeries quantile_bands(const OutageEnsemble& ensemble,
                          std::vector<double> levels = {0.01, 0.99});

struct CalibrationResult {
  FragilityParams params;
  double residual = 0.0;  // final sum of squared CDF errors
  int iterations = 0;
};

// Least-squares probit fit of (lambda, beta) to points (gust wind in mph,
// outage fraction). Fractions are clamped to [0.001, 0.999] first; beta is
// kept >= 0.01 through a log parameterization; search is Nelder-Mead started
// at the interpolated 50%-crossing wind.
CalibrationResult calibrate_fragility(std::vector<std::pair<double, double>> points);

struct SweepEntry {
  Method method = Method::hrsra;
  std::int64_t dt_s = 0;
  double avg_rmse = 0.0;
};

// Reruns both methods at each resolution with the same master seed and
// scores each ensemble against the observed system trace.
std::vector<SweepEntry> resolution_sweep(const Network& net,
                                         const RegionFragilityTable& fragility,
                                         const TcTrack& track, const GeoBox& bbox,
                                         double cell_size_deg, const WindProfileParams& profile,
                                         const SimulationConfig& base_cfg,
                                         const std::vector<std::int64_t>& dts,
                                         const ObservedOutageSeries& observed);

void save_sweep_csv(const std::vector<SweepEntry>& entries, const std::filesystem::path& path);

struct RegionComparison {
  double avg_rmse = 0.0;
  BandSeries bands;
};

struct ComparisonReport {
  std::string method;
  double avg_rmse_total = 0.0;
  BandSeries bands_total;
  std::map<std::string, RegionComparison> per_region;
  std::vector<SweepEntry> resolution_table;  // optional

  // report.json plus bands.csv (timestamp,mean,q01,q99), per-region band
  // CSVs, and resolution.csv (method,dt_s,avg_rmse) when present.
  void save(const std::filesystem::path& dir) const;
};

ComparisonReport compare_ensemble(const OutageEnsemble& ensemble,
                                  const std::map<std::string, ObservedOutageSeries>& observed);

}  // namespace stormrisk
