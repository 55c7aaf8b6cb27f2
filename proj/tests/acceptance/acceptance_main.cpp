// Acceptance suite: every release gate in one binary, one PASS/FAIL line per
// criterion. Exits nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "stormrisk/analytics.hpp"
#include "stormrisk/fragility.hpp"
#include "stormrisk/manifest.hpp"
#include "stormrisk/mathstat.hpp"
#include "stormrisk/rng.hpp"
#include "stormrisk/simulate.hpp"
#include "stormrisk/synth.hpp"
#include "stormrisk/track.hpp"
#include "stormrisk/wind_field.hpp"

namespace fs = std::filesystem;
using namespace stormrisk;

namespace {

int g_failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
  std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << criterion << " (" << name
            << "): " << detail << "\n";
  if (!pass) ++g_failures;
}

WindFieldSeries uniform_island_wind(const GeoBox& bbox, const std::vector<double>& sustained,
                                    std::int64_t dt_s) {
  const int n_lat = WindFieldSeries::grid_cells(bbox.lat_min, bbox.lat_max, 2.0);
  const int n_lon = WindFieldSeries::grid_cells(bbox.lon_min, bbox.lon_max, 2.0);
  std::vector<UnixTime> ts(sustained.size());
  std::vector<double> raster;
  raster.reserve(sustained.size() * n_lat * n_lon);
  for (std::size_t k = 0; k < sustained.size(); ++k) {
    ts[k] = static_cast<UnixTime>(k) * dt_s;
    raster.insert(raster.end(), static_cast<std::size_t>(n_lat) * n_lon, sustained[k]);
  }
  return WindFieldSeries(bbox, 2.0, ts, raster);
}

double sustained_for_gust_mph(double mph) { return mph / kMphPerMs / 1.49; }

// ---------------------------------------------------------------------------
// 1. HRSRA analytic oracle: empirical failure fraction equals the fragility
//    CDF at constant wind, independent of step count.
void criterion_1() {
  Timer timer;
  const FragilityParams san_juan{4.4443, 0.4226};
  Network net;
  net.regions = {"SanJuan"};
  Feeder f;
  f.id = "F1";
  f.region = "SanJuan";
  f.load_mw = 10.0;
  f.poles = {{18.2, -66.3}};
  net.feeders.push_back(f);
  RegionFragilityTable table;
  table.set("SanJuan", san_juan);

  const int n_runs = 10000;
  bool pass = true;
  std::ostringstream detail;
  for (double w : {60.0, 85.0, 120.0}) {
    GeoBox bbox{17.6, 18.8, -67.6, -65.0};
    const WindFieldSeries wind =
        uniform_island_wind(bbox, std::vector<double>(3, sustained_for_gust_mph(w)), 600);
    SimulationConfig cfg;
    cfg.n_runs = n_runs;
    cfg.dt_s = 600;
    cfg.t_start = 0;
    cfg.t_end = 1200;
    cfg.master_seed = 2023;
    cfg.threads = 0;
    const OutageEnsemble ens = run_hrsra(net, table, wind, cfg);
    int failed = 0;
    for (int j = 0; j < n_runs; ++j)
      if (ens.at(j, 2) > 50.0) ++failed;
    const double fraction = static_cast<double>(failed) / n_runs;
    const double expect = norm_cdf((std::log(w) - san_juan.lambda) / san_juan.beta);
    const double margin = 3.0 * std::sqrt(expect * (1.0 - expect) / n_runs);
    const bool ok = std::fabs(fraction - expect) < margin;
    pass = pass && ok;
    detail << "w=" << w << " |" << fraction << "-" << expect << "|<" << margin
           << (ok ? " ok; " : " VIOLATED; ");
  }
  const double secs = timer.seconds();
  pass = pass && secs < 10.0;
  detail << "runtime " << secs << "s";
  report(1, "hrsra analytic oracle", pass, detail.str());
}

// ---------------------------------------------------------------------------
// 2. SMC analytic oracle: geometric survival at constant per-step hazard.
void criterion_2() {
  Timer timer;
  const FragilityParams san_juan{4.4443, 0.4226};
  Network net;
  net.regions = {"SanJuan"};
  Feeder f;
  f.id = "F1";
  f.region = "SanJuan";
  f.load_mw = 10.0;
  f.poles = {{18.2, -66.3}};
  net.feeders.push_back(f);
  RegionFragilityTable table;
  table.set("SanJuan", san_juan);

  const double w = std::exp(san_juan.lambda + san_juan.beta * norm_ppf(0.1));
  GeoBox bbox{17.6, 18.8, -67.6, -65.0};
  const WindFieldSeries wind =
      uniform_island_wind(bbox, std::vector<double>(10, sustained_for_gust_mph(w)), 600);
  SimulationConfig cfg;
  cfg.n_runs = 10000;
  cfg.dt_s = 600;
  cfg.t_start = 0;
  cfg.t_end = 9 * 600;
  cfg.method = Method::smc;
  cfg.master_seed = 2024;
  const OutageEnsemble ens = run_smc(net, table, wind, cfg);
  int failed = 0;
  for (int j = 0; j < cfg.n_runs; ++j)
    if (ens.at(j, 9) > 50.0) ++failed;
  const double survival = 1.0 - static_cast<double>(failed) / cfg.n_runs;
  const double expect = std::pow(0.9, 10);
  const double secs = timer.seconds();
  const bool pass = std::fabs(survival - expect) < 0.015 && secs < 10.0;
  std::ostringstream detail;
  detail << "survival " << survival << " vs 0.9^10=" << expect << " (tol 0.015), runtime " << secs
         << "s";
  report(2, "smc analytic oracle", pass, detail.str());
}

// ---------------------------------------------------------------------------
// 3. Failure-probability-curse demonstration on the island-scale scenario.
void criterion_3() {
  Timer timer;
  SynthParams params;
  params.seed = 7;
  const Network net = synth_network(params);
  const RegionFragilityTable table = default_fragility_table();
  const TcTrack track = synth_track(params);

  const int n_runs = 1500;

  // Synthetic observed series: the mean hrsra trajectory at 10-minute
  // resolution under the same fragility, i.e. calibrated by construction.
  const WindFieldSeries wind600 = generate_wind_fields(track, params.bbox, 0.05, 600);
  SimulationConfig obs_cfg;
  obs_cfg.n_runs = n_runs;
  obs_cfg.dt_s = 600;
  obs_cfg.t_start = wind600.timestamps().front();
  obs_cfg.t_end = wind600.timestamps().back();
  obs_cfg.master_seed = 1007;
  const auto observed_all = synth_observed_simulate(net, table, wind600, obs_cfg);
  const ObservedOutageSeries& observed = observed_all.at("total");

  SimulationConfig base;
  base.n_runs = n_runs;
  base.t_start = obs_cfg.t_start;
  base.t_end = obs_cfg.t_end;
  base.master_seed = 42;
  const std::vector<std::int64_t> dts = {600, 3600, 7200};
  const auto entries =
      resolution_sweep(net, table, track, params.bbox, 0.05, {}, base, dts, observed);

  double h600 = 0, h3600 = 0, h7200 = 0, s600 = 0, s3600 = 0, s7200 = 0;
  for (const auto& e : entries) {
    double& slot = e.method == Method::hrsra
                       ? (e.dt_s == 600 ? h600 : e.dt_s == 3600 ? h3600 : h7200)
                       : (e.dt_s == 600 ? s600 : e.dt_s == 3600 ? s3600 : s7200);
    slot = e.avg_rmse;
  }

  const double hmin = std::min({h600, h3600, h7200});
  const double hmax = std::max({h600, h3600, h7200});
  const bool hrsra_stable = (hmax - hmin) / hmin < 0.25;
  const bool hrsra_near_min = h600 <= 1.10 * hmin;
  const bool smc_ordered = s600 > s3600 && s3600 > s7200;
  const bool contrast = s600 > 3.0 * h600;
  const bool pass = hrsra_stable && hrsra_near_min && smc_ordered && contrast;

  std::ostringstream detail;
  detail << "hrsra rmse {" << h600 << ", " << h3600 << ", " << h7200 << "} smc rmse {" << s600
         << ", " << s3600 << ", " << s7200 << "}; spread "
         << 100.0 * (hmax - hmin) / hmin << "%, contrast x" << s600 / h600 << ", runtime "
         << timer.seconds() << "s";
  report(3, "failure probability curse", pass, detail.str());
}

// ---------------------------------------------------------------------------
// 4. Frequency invariance: hrsra is bit-identical under step-splitting.
void criterion_4() {
  Timer timer;
  int passed_cases = 0;
  const int n_cases = 50;
  SynthRng case_rng(4242, 99);

  for (int c = 0; c < n_cases; ++c) {
    SynthParams params;
    params.n_feeders = 3 + static_cast<int>(case_rng.uniform_int(18));
    params.seed = 1000 + c;
    const Network net = synth_network(params);
    const RegionFragilityTable table = default_fragility_table();

    const int k_base = 2 + static_cast<int>(case_rng.uniform_int(5));
    const int split = 2 + static_cast<int>(case_rng.uniform_int(3));
    std::vector<double> base_vals(k_base);
    for (double& v : base_vals) v = sustained_for_gust_mph(case_rng.uniform(20.0, 130.0));
    std::vector<double> ref_vals;
    for (int k = 0; k < k_base; ++k) {
      const int copies = (k + 1 == k_base) ? 1 : split;
      for (int m = 0; m < copies; ++m) ref_vals.push_back(base_vals[k]);
    }

    const std::int64_t dt_fine = 600;
    const std::int64_t dt_base = dt_fine * split;
    const int n_lat = WindFieldSeries::grid_cells(params.bbox.lat_min, params.bbox.lat_max, 2.0);
    const int n_lon = WindFieldSeries::grid_cells(params.bbox.lon_min, params.bbox.lon_max, 2.0);

    auto make_series = [&](const std::vector<double>& vals, std::int64_t dt) {
      std::vector<UnixTime> ts(vals.size());
      std::vector<double> raster;
      for (std::size_t k = 0; k < vals.size(); ++k) {
        ts[k] = static_cast<UnixTime>(k) * dt;
        raster.insert(raster.end(), static_cast<std::size_t>(n_lat) * n_lon, vals[k]);
      }
      return WindFieldSeries(params.bbox, 2.0, ts, raster);
    };
    const WindFieldSeries wind_base = make_series(base_vals, dt_base);
    const WindFieldSeries wind_ref = make_series(ref_vals, dt_fine);

    SimulationConfig cfg_base;
    cfg_base.n_runs = 30;
    cfg_base.dt_s = dt_base;
    cfg_base.t_start = 0;
    cfg_base.t_end = static_cast<UnixTime>(k_base - 1) * dt_base;
    cfg_base.master_seed = 8800 + c;
    SimulationConfig cfg_ref = cfg_base;
    cfg_ref.dt_s = dt_fine;

    const OutageEnsemble a = run_hrsra(net, table, wind_base, cfg_base);
    const OutageEnsemble b = run_hrsra(net, table, wind_ref, cfg_ref);

    bool identical = true;
    for (int j = 0; j < cfg_base.n_runs && identical; ++j)
      for (int k = 0; k < k_base && identical; ++k)
        identical = a.at(j, k) == b.at(j, static_cast<std::size_t>(k) * split);
    if (identical) ++passed_cases;
  }
  std::ostringstream detail;
  detail << passed_cases << "/" << n_cases << " randomized refinements bit-identical, runtime "
         << timer.seconds() << "s";
  report(4, "hrsra frequency invariance", passed_cases == n_cases, detail.str());
}

// ---------------------------------------------------------------------------
// 5. Calibration recovery for all seven regional parameter pairs.
void criterion_5() {
  Timer timer;
  const RegionFragilityTable table = default_fragility_table();
  bool pass = true;
  std::ostringstream detail;
  for (const auto& [region, truth] : table.entries()) {
    std::vector<std::pair<double, double>> points;
    for (int i = 0; i < 20; ++i) {
      const double p = 0.03 + (0.97 - 0.03) * i / 19.0;
      points.emplace_back(std::exp(truth.lambda + truth.beta * norm_ppf(p)), p);
    }
    const CalibrationResult fit = calibrate_fragility(points);
    const bool ok = std::fabs(fit.params.lambda - truth.lambda) < 0.01 &&
                    std::fabs(fit.params.beta - truth.beta) < 0.02;
    pass = pass && ok;
    if (!ok)
      detail << region << " missed (" << fit.params.lambda << "," << fit.params.beta << "); ";
  }
  const double secs = timer.seconds();
  pass = pass && secs < 5.0;
  detail << "7 regions fitted, runtime " << secs << "s";
  report(5, "calibration recovery", pass, detail.str());
}

// ---------------------------------------------------------------------------
// 6. Wind-field checks: profile peak, exact gust factor, right-side asymmetry.
void criterion_6() {
  Timer timer;
  bool pass = true;
  std::ostringstream detail;

  const double peak = holland_rotational_speed(30.0, 40.0, 30.0, 1.3);
  const bool peak_ok = std::fabs(peak - 40.0) <= 1e-9 * 40.0;
  pass = pass && peak_ok;
  detail << "peak " << peak << (peak_ok ? " ok; " : " VIOLATED; ");

  const TcTrack track = parse_track(fs::path(STORMRISK_TEST_DATA) / "track_fiona_like.csv");
  GeoBox bbox{16.0, 18.8, -68.0, -64.5};
  const WindFieldSeries wind = generate_wind_fields(track, bbox, 0.05, 3600);

  bool ratio_ok = true;
  for (std::size_t s = 0; s < wind.timestamps().size(); ++s)
    for (int i = 0; i < wind.n_lat(); i += 3)
      for (int j = 0; j < wind.n_lon(); j += 3) {
        const LatLon cell = wind.cell_center(i, j);
        const double sus = wind.sustained_at(cell, wind.timestamps()[s]);
        const double gust = wind.gust_at(cell, wind.timestamps()[s]);
        if (gust != 1.49 * sus) ratio_ok = false;
      }
  pass = pass && ratio_ok;
  detail << "gust ratio exactly 1.49 " << (ratio_ok ? "ok; " : "VIOLATED; ");

  const auto instants = storm_instants(interpolate_track(track, 3600));
  double right_max = 0.0, left_max = 0.0;
  for (std::size_t s = 0; s < instants.size(); ++s) {
    const auto& inst = instants[s];
    for (int i = 0; i < wind.n_lat(); ++i)
      for (int j = 0; j < wind.n_lon(); ++j) {
        double de = 0.0, dn = 0.0;
        local_displacement_km({inst.point.lat, inst.point.lon}, wind.cell_center(i, j), de, dn);
        const double cross = inst.trans_east_ms * dn - inst.trans_north_ms * de;
        const double gust = wind.gust_factor() * wind.sustained_cell(s, i, j);
        if (cross < 0.0)
          right_max = std::max(right_max, gust);
        else if (cross > 0.0)
          left_max = std::max(left_max, gust);
      }
  }
  const bool asym_ok = right_max >= left_max;
  pass = pass && asym_ok;
  detail << "right " << right_max << " vs left " << left_max
         << (asym_ok ? " ok" : " VIOLATED") << ", runtime " << timer.seconds() << "s";
  report(6, "wind-field checks", pass, detail.str());
}

// ---------------------------------------------------------------------------
// 7. Determinism and runtime budget of the CLI at full scale.
void criterion_7() {
  Timer timer;
  const fs::path work = fs::temp_directory_path() / "stormrisk_acceptance_c7";
  fs::remove_all(work);
  fs::create_directories(work);

  auto shell = [&](const std::string& args) {
    const std::string cmd = "cd '" + work.string() + "' && '" + STORMRISK_CLI_BIN + "' " + args +
                            " > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };

  bool pass = true;
  std::ostringstream detail;
  if (shell("synth --feeders 936 --regions 7 --seed 7 --observed-mode fragility-exact --out fx") !=
      0) {
    report(7, "determinism and runtime budget", false, "synth fixture generation failed");
    return;
  }
  {
    std::ofstream cfg(work / "cfg.json");
    cfg << R"({
      "track": "fx/track.csv",
      "network": "fx/network.json",
      "fragility": "fx/fragility.csv",
      "cell_size_deg": 0.05,
      "dt_s": 600,
      "method": "hrsra",
      "n_runs": 10000,
      "master_seed": 42,
      "store_regional": false,
      "out_dir": "ens"
    })";
  }

  std::vector<std::string> digests;
  for (int threads : {1, 4, 8}) {
    Timer run_timer;
    const std::string out = "ens_t" + std::to_string(threads);
    if (shell("simulate --config cfg.json --threads " + std::to_string(threads) + " --out " +
              out) != 0) {
      pass = false;
      detail << "threads=" << threads << " run failed; ";
      continue;
    }
    const double secs = run_timer.seconds();
    if (secs >= 60.0) pass = false;
    detail << "threads=" << threads << " " << secs << "s; ";
    digests.push_back(fnv1a_digest_hex(work / out / "p_fail.csv") + "+" +
                      fnv1a_digest_hex(work / out / "summary.json"));
  }
  for (std::size_t k = 1; k < digests.size(); ++k)
    if (digests[k] != digests[0]) {
      pass = false;
      detail << "outputs differ across worker counts; ";
    }
  if (digests.size() == 3 && digests[0] == digests[1] && digests[1] == digests[2])
    detail << "byte-identical outputs; ";
  detail << "total " << timer.seconds() << "s";
  report(7, "determinism and runtime budget", pass, detail.str());
}

// ---------------------------------------------------------------------------
// 8. Average-RMSE definition: a constant offset comes back exactly.
void criterion_8() {
  ObservedOutageSeries obs;
  obs.timestamps = {0, 600, 1200, 1800, 2400};
  obs.outage_pct = {10.0, 20.0, 30.0, 40.0, 50.0};
  OutageEnsemble ens;
  ens.n_runs = 1;
  ens.timestamps = obs.timestamps;
  ens.p_fail = {15.0, 25.0, 35.0, 45.0, 55.0};
  const double rmse = avg_rmse(obs, ens);
  const bool pass = std::fabs(rmse - 5.0) <= 1e-12;
  std::ostringstream detail;
  detail << "constant +5 offset -> " << rmse << " (tol 1e-12)";
  report(8, "rmse constant-offset identity", pass, detail.str());
}

}  // namespace

int main() {
  std::cout << "stormrisk acceptance suite\n";
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED\n"
                                : std::to_string(g_failures) + " CRITERIA FAILED\n");
  return g_failures == 0 ? 0 : 1;
}
