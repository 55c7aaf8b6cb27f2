// stormrisk command-line front end.
//
// Subcommands: windfield, simulate, compare, calibrate, synth, sweep.
// Exit codes: 0 success, 2 input/data error, 3 internal error; CLI11 usage
// errors keep their own codes.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "stormrisk/analytics.hpp"
#include "stormrisk/errors.hpp"
#include "stormrisk/manifest.hpp"
#include "stormrisk/network.hpp"
#include "stormrisk/simulate.hpp"
#include "stormrisk/synth.hpp"
#include "stormrisk/track.hpp"
#include "stormrisk/wind_field.hpp"

namespace fs = std::filesystem;
using namespace stormrisk;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitInternalError = 3;

struct ScenarioConfig {
  std::string track;
  std::string network;
  std::string fragility;
  std::string windfield_dir;  // reuse an exported wind field instead of generating
  GeoBox bbox{17.6, 18.8, -67.6, -65.0};
  double cell_size_deg = 0.05;
  std::string t_start_iso;
  std::string t_end_iso;
  std::int64_t dt_s = 600;
  std::string method = "hrsra";
  int n_runs = 10000;
  std::uint64_t master_seed = 42;
  int threads = 0;
  bool store_regional = true;
  double gust_factor = kDefaultGustFactor;
  WindProfileParams profile;
  std::string out_dir = "out";
};

GeoBox bbox_from_json(const nlohmann::json& j) {
  return {j.at("lat_min").get<double>(), j.at("lat_max").get<double>(),
          j.at("lon_min").get<double>(), j.at("lon_max").get<double>()};
}

ScenarioConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(Errc::malformed_file, "cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(Errc::malformed_file, "config json: " + std::string(e.what()));
  }
  ScenarioConfig cfg;
  try {
    cfg.track = j.value("track", cfg.track);
    cfg.network = j.value("network", cfg.network);
    cfg.fragility = j.value("fragility", cfg.fragility);
    cfg.windfield_dir = j.value("windfield", cfg.windfield_dir);
    if (j.contains("bbox")) cfg.bbox = bbox_from_json(j["bbox"]);
    cfg.cell_size_deg = j.value("cell_size_deg", cfg.cell_size_deg);
    cfg.t_start_iso = j.value("t_start", cfg.t_start_iso);
    cfg.t_end_iso = j.value("t_end", cfg.t_end_iso);
    cfg.dt_s = j.value("dt_s", cfg.dt_s);
    cfg.method = j.value("method", cfg.method);
    cfg.n_runs = j.value("n_runs", cfg.n_runs);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.store_regional = j.value("store_regional", cfg.store_regional);
    cfg.gust_factor = j.value("gust_factor", cfg.gust_factor);
    if (j.contains("profile")) {
      const auto& p = j["profile"];
      cfg.profile.shape_b = p.value("shape_b", cfg.profile.shape_b);
      cfg.profile.asym_alpha = p.value("asym_alpha", cfg.profile.asym_alpha);
      cfg.profile.asym_theta_deg = p.value("asym_theta_deg", cfg.profile.asym_theta_deg);
    }
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(Errc::malformed_file, "config json: " + std::string(e.what()));
  }
  return cfg;
}

nlohmann::json config_echo(const ScenarioConfig& cfg) {
  nlohmann::json j;
  j["track"] = cfg.track;
  j["network"] = cfg.network;
  j["fragility"] = cfg.fragility;
  if (!cfg.windfield_dir.empty()) j["windfield"] = cfg.windfield_dir;
  j["bbox"] = {{"lat_min", cfg.bbox.lat_min},
               {"lat_max", cfg.bbox.lat_max},
               {"lon_min", cfg.bbox.lon_min},
               {"lon_max", cfg.bbox.lon_max}};
  j["cell_size_deg"] = cfg.cell_size_deg;
  if (!cfg.t_start_iso.empty()) j["t_start"] = cfg.t_start_iso;
  if (!cfg.t_end_iso.empty()) j["t_end"] = cfg.t_end_iso;
  j["dt_s"] = cfg.dt_s;
  j["method"] = cfg.method;
  j["n_runs"] = cfg.n_runs;
  j["master_seed"] = cfg.master_seed;
  j["store_regional"] = cfg.store_regional;
  j["gust_factor"] = cfg.gust_factor;
  j["profile"] = {{"shape_b", cfg.profile.shape_b},
                  {"asym_alpha", cfg.profile.asym_alpha},
                  {"asym_theta_deg", cfg.profile.asym_theta_deg}};
  return j;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

WindFieldSeries make_wind(const ScenarioConfig& cfg, RunManifest& manifest) {
  if (!cfg.windfield_dir.empty()) {
    manifest.add_input(fs::path(cfg.windfield_dir) / "manifest.json");
    return WindFieldSeries::load(cfg.windfield_dir);
  }
  if (cfg.track.empty())
    throw InputError(Errc::invalid_config, "config needs either 'track' or 'windfield'");
  manifest.add_input(cfg.track);
  const TcTrack track = parse_track(cfg.track);
  return generate_wind_fields(track, cfg.bbox, cfg.cell_size_deg, cfg.dt_s, cfg.profile,
                              cfg.gust_factor);
}

SimulationConfig sim_config(const ScenarioConfig& cfg, const WindFieldSeries& wind) {
  SimulationConfig sim;
  sim.n_runs = cfg.n_runs;
  sim.dt_s = cfg.dt_s;
  sim.t_start = cfg.t_start_iso.empty() ? wind.timestamps().front() : parse_iso8601(cfg.t_start_iso);
  sim.t_end = cfg.t_end_iso.empty() ? wind.timestamps().back() : parse_iso8601(cfg.t_end_iso);
  sim.method = method_from_string(cfg.method);
  sim.master_seed = cfg.master_seed;
  sim.threads = cfg.threads;
  sim.store_regional = cfg.store_regional;
  return sim;
}

int cmd_windfield(const std::string& track_path, const std::vector<double>& bbox_vals,
                  double cell_size, std::int64_t dt_s, const std::string& out_dir) {
  Timer timer;
  RunManifest manifest;
  manifest.command = "windfield";
  manifest.add_input(track_path);

  const TcTrack track = parse_track(track_path);
  GeoBox bbox{17.6, 18.8, -67.6, -65.0};
  if (!bbox_vals.empty())
    bbox = {bbox_vals[0], bbox_vals[2], bbox_vals[1], bbox_vals[3]};
  const WindFieldSeries wind = generate_wind_fields(track, bbox, cell_size, dt_s);
  wind.save(out_dir);

  nlohmann::json echo;
  echo["track"] = track_path;
  echo["bbox"] = {{"lat_min", bbox.lat_min}, {"lat_max", bbox.lat_max},
                  {"lon_min", bbox.lon_min}, {"lon_max", bbox.lon_max}};
  echo["cell_size_deg"] = cell_size;
  echo["dt_s"] = dt_s;
  manifest.config_echo_json = echo.dump();
  manifest.duration_s = timer.seconds();
  manifest.add_output_tree(out_dir);
  manifest.write(fs::path(out_dir) / "run_manifest.json");
  std::cout << "windfield: " << wind.timestamps().size() << " rasters (" << wind.n_lat() << "x"
            << wind.n_lon() << " cells) -> " << out_dir << "\n";
  return kExitOk;
}

int cmd_simulate(ScenarioConfig cfg) {
  Timer timer;
  RunManifest manifest;
  manifest.command = "simulate";
  manifest.master_seed = cfg.master_seed;
  manifest.threads = cfg.threads;

  if (cfg.network.empty() || cfg.fragility.empty())
    throw InputError(Errc::invalid_config, "config needs 'network' and 'fragility'");
  manifest.add_input(cfg.network);
  manifest.add_input(cfg.fragility);

  const WindFieldSeries wind = make_wind(cfg, manifest);
  const Network net = parse_network(cfg.network);
  const RegionFragilityTable fragility = parse_fragility(cfg.fragility);
  const SimulationConfig sim = sim_config(cfg, wind);

  const OutageEnsemble ens = run_simulation(net, fragility, wind, sim);
  ens.save(cfg.out_dir);

  manifest.config_echo_json = config_echo(cfg).dump();
  manifest.duration_s = timer.seconds();
  manifest.add_output_tree(cfg.out_dir);
  manifest.write(fs::path(cfg.out_dir) / "run_manifest.json");
  std::cout << "simulate: method=" << method_name(ens.method) << " runs=" << ens.n_runs
            << " steps=" << ens.timestamps.size() << " -> " << cfg.out_dir << "\n";
  return kExitOk;
}

int cmd_compare(const std::vector<std::string>& ensemble_dirs, const std::string& observed_path,
                const std::string& out_dir) {
  Timer timer;
  RunManifest manifest;
  manifest.command = "compare";
  manifest.add_input(observed_path);

  const auto observed = parse_observed(observed_path);
  fs::create_directories(out_dir);
  for (const auto& dir : ensemble_dirs) {
    const OutageEnsemble ens = OutageEnsemble::load(dir);
    const ComparisonReport report = compare_ensemble(ens, observed);
    const fs::path report_dir = fs::path(out_dir) / (fs::path(dir).filename().string() + "_report");
    report.save(report_dir);
    std::cout << "compare: " << dir << " method=" << report.method
              << " avg_rmse=" << report.avg_rmse_total << " -> " << report_dir.string() << "\n";
  }

  nlohmann::json echo;
  echo["ensembles"] = ensemble_dirs;
  echo["observed"] = observed_path;
  manifest.config_echo_json = echo.dump();
  manifest.duration_s = timer.seconds();
  manifest.add_output_tree(out_dir);
  manifest.write(fs::path(out_dir) / "run_manifest.json");
  return kExitOk;
}

int cmd_calibrate(const std::string& observed_path, const std::string& windfield_dir,
                  const std::string& network_path, const std::string& out_path, bool total_only) {
  Timer timer;
  RunManifest manifest;
  manifest.command = "calibrate";
  manifest.add_input(observed_path);
  manifest.add_input(network_path);
  manifest.add_input(fs::path(windfield_dir) / "manifest.json");

  const auto observed = parse_observed(observed_path);
  const WindFieldSeries wind = WindFieldSeries::load(windfield_dir);
  const Network net = parse_network(network_path);

  auto total_it = observed.find("total");
  if (total_it == observed.end())
    throw InputError(Errc::missing_region, "observed file has no 'total' series");
  const std::vector<UnixTime>& grid = total_it->second.timestamps;
  const auto exposure = regional_exposure_mph(net, wind, grid);

  RegionFragilityTable table;
  auto fit_one = [&](const std::string& label, const ObservedOutageSeries& series) {
    const auto& winds = exposure.at(label);
    std::vector<std::pair<double, double>> points;
    for (std::size_t t = 0; t < series.timestamps.size() && t < winds.size(); ++t)
      if (winds[t] > 0.0) points.emplace_back(winds[t], series.outage_pct[t] / 100.0);
    const CalibrationResult fit = calibrate_fragility(points);
    table.set(label, fit.params);
    std::cout << "calibrate: " << label << " lambda=" << fit.params.lambda
              << " beta=" << fit.params.beta << " residual=" << fit.residual << "\n";
  };

  if (total_only) {
    fit_one("total", total_it->second);
  } else {
    for (const auto& region : net.regions) {
      auto it = observed.find(region);
      if (it == observed.end())
        throw InputError(Errc::missing_region,
                         "observed file has no series for region '" + region + "'");
      fit_one(region, it->second);
    }
  }
  save_fragility(table, out_path);

  nlohmann::json echo;
  echo["observed"] = observed_path;
  echo["windfield"] = windfield_dir;
  echo["network"] = network_path;
  echo["mode"] = total_only ? "total" : "per-region";
  manifest.config_echo_json = echo.dump();
  manifest.duration_s = timer.seconds();
  manifest.add_output(out_path);
  manifest.write(fs::path(out_path).parent_path() / "run_manifest.json");
  return kExitOk;
}

int cmd_synth(SynthParams params, const std::string& observed_mode, int observed_runs,
              const std::string& out_dir) {
  Timer timer;
  RunManifest manifest;
  manifest.command = "synth";
  manifest.master_seed = params.seed;

  fs::create_directories(out_dir);
  const Network net = synth_network(params);
  const TcTrack track = synth_track(params);
  const RegionFragilityTable fragility = default_fragility_table();

  // Fragility rows are emitted only for regions the network references.
  RegionFragilityTable used;
  for (const auto& region : net.regions) {
    if (fragility.has(region))
      used.set(region, fragility.at(region));
    else
      used.set(region, {4.5, 0.4});  // synthetic extra regions
  }

  save_network(net, fs::path(out_dir) / "network.json");
  save_track(track, fs::path(out_dir) / "track.csv");
  save_fragility(used, fs::path(out_dir) / "fragility.csv");

  const WindFieldSeries wind =
      generate_wind_fields(track, params.bbox, 0.05, params.dt_s);
  std::map<std::string, ObservedOutageSeries> observed;
  if (observed_mode == "fragility-exact") {
    observed = synth_observed_fragility_exact(net, used, wind, wind.timestamps());
  } else {
    SimulationConfig sim;
    sim.n_runs = observed_runs;
    sim.dt_s = params.dt_s;
    sim.t_start = wind.timestamps().front();
    sim.t_end = wind.timestamps().back();
    sim.master_seed = params.seed + 1;
    observed = synth_observed_simulate(net, used, wind, sim);
  }
  save_observed(observed, fs::path(out_dir) / "observed.csv");

  nlohmann::json echo;
  echo["feeders"] = params.n_feeders;
  echo["regions"] = params.n_regions;
  echo["total_load_mw"] = params.total_load_mw;
  echo["seed"] = params.seed;
  echo["dt_s"] = params.dt_s;
  echo["observed_mode"] = observed_mode;
  echo["observed_runs"] = observed_runs;
  manifest.config_echo_json = echo.dump();
  manifest.duration_s = timer.seconds();
  manifest.add_output_tree(out_dir);
  manifest.write(fs::path(out_dir) / "run_manifest.json");
  std::cout << "synth: " << net.feeders.size() << " feeders, " << net.regions.size()
            << " regions -> " << out_dir << "\n";
  return kExitOk;
}

int cmd_sweep(ScenarioConfig cfg, const std::vector<std::int64_t>& dts,
              const std::string& observed_path) {
  Timer timer;
  RunManifest manifest;
  manifest.command = "sweep";
  manifest.master_seed = cfg.master_seed;
  manifest.threads = cfg.threads;

  if (cfg.track.empty() || cfg.network.empty() || cfg.fragility.empty())
    throw InputError(Errc::invalid_config, "config needs 'track', 'network' and 'fragility'");
  manifest.add_input(cfg.track);
  manifest.add_input(cfg.network);
  manifest.add_input(cfg.fragility);
  manifest.add_input(observed_path);

  const TcTrack track = parse_track(cfg.track);
  const Network net = parse_network(cfg.network);
  const RegionFragilityTable fragility = parse_fragility(cfg.fragility);
  const auto observed = parse_observed(observed_path);
  auto total_it = observed.find("total");
  if (total_it == observed.end())
    throw InputError(Errc::missing_region, "observed file has no 'total' series");

  SimulationConfig base;
  base.n_runs = cfg.n_runs;
  base.t_start = cfg.t_start_iso.empty() ? track.start() : parse_iso8601(cfg.t_start_iso);
  base.t_end = cfg.t_end_iso.empty() ? track.end() : parse_iso8601(cfg.t_end_iso);
  base.master_seed = cfg.master_seed;
  base.threads = cfg.threads;

  const auto entries = resolution_sweep(net, fragility, track, cfg.bbox, cfg.cell_size_deg,
                                        cfg.profile, base, dts, total_it->second);
  fs::create_directories(cfg.out_dir);
  save_sweep_csv(entries, fs::path(cfg.out_dir) / "resolution.csv");
  for (const auto& e : entries)
    std::cout << "sweep: method=" << method_name(e.method) << " dt=" << e.dt_s
              << "s avg_rmse=" << e.avg_rmse << "\n";

  nlohmann::json echo = config_echo(cfg);
  echo["dts"] = dts;
  echo["observed"] = observed_path;
  manifest.config_echo_json = echo.dump();
  manifest.duration_s = timer.seconds();
  manifest.add_output_tree(cfg.out_dir);
  manifest.write(fs::path(cfg.out_dir) / "run_manifest.json");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hurricane outage Monte Carlo simulator for radial distribution networks"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  // windfield
  auto* wf = app.add_subcommand("windfield", "Generate and export a gust wind field raster series");
  std::string wf_track, wf_out = "windfield";
  std::vector<double> wf_bbox;
  double wf_cell = 0.05;
  std::int64_t wf_dt = 600;
  wf->add_option("--track", wf_track, "Track CSV path")->required();
  wf->add_option("--bbox", wf_bbox, "lat_min,lon_min,lat_max,lon_max")->expected(4)->delimiter(',');
  wf->add_option("--cell", wf_cell, "Raster cell size, degrees");
  wf->add_option("--dt", wf_dt, "Time step, seconds");
  wf->add_option("--out", wf_out, "Output directory");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo outage simulation");
  std::string sim_config_path;
  std::optional<std::uint64_t> sim_seed;
  std::optional<std::string> sim_method;
  std::optional<std::int64_t> sim_dt;
  std::optional<int> sim_threads;
  std::optional<std::string> sim_out;
  sim->add_option("--config", sim_config_path, "Config JSON path")->required();
  sim->add_option("--seed", sim_seed, "Master seed override");
  sim->add_option("--method", sim_method, "Method override")
      ->check(CLI::IsMember({"hrsra", "smc"}));
  sim->add_option("--dt", sim_dt, "Time step override, seconds");
  sim->add_option("--threads", sim_threads, "Worker thread cap (0 = hardware)");
  sim->add_option("--out", sim_out, "Output directory override");

  // compare
  auto* cmp = app.add_subcommand("compare", "Score ensembles against an observed outage series");
  std::vector<std::string> cmp_ensembles;
  std::string cmp_observed, cmp_out = "compare";
  cmp->add_option("--ensemble", cmp_ensembles, "Ensemble directory (repeatable)")->required();
  cmp->add_option("--observed", cmp_observed, "Observed outage CSV")->required();
  cmp->add_option("--out", cmp_out, "Output directory");

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "Fit fragility parameters from observed outages");
  std::string cal_observed, cal_windfield, cal_network, cal_out = "fragility_fit.csv";
  bool cal_total = false;
  cal->add_option("--observed", cal_observed, "Observed outage CSV")->required();
  cal->add_option("--windfield", cal_windfield, "Exported wind field directory")->required();
  cal->add_option("--network", cal_network, "Network JSON")->required();
  cal->add_option("--out", cal_out, "Output fragility CSV");
  cal->add_flag("--total", cal_total, "Fit one curve to the total series instead of per region");

  // synth
  auto* syn = app.add_subcommand("synth", "Generate synthetic network/track/observed fixtures");
  SynthParams syn_params;
  std::string syn_out = "synth";
  std::string syn_observed_mode = "simulate";
  int syn_observed_runs = 500;
  syn->add_option("--feeders", syn_params.n_feeders, "Feeder count");
  syn->add_option("--regions", syn_params.n_regions, "Region count");
  syn->add_option("--total-load", syn_params.total_load_mw, "System load, MW");
  syn->add_option("--seed", syn_params.seed, "Fixture seed");
  syn->add_option("--dt", syn_params.dt_s, "Observed series time step, seconds");
  syn->add_option("--observed-mode", syn_observed_mode, "simulate | fragility-exact")
      ->check(CLI::IsMember({"simulate", "fragility-exact"}));
  syn->add_option("--observed-runs", syn_observed_runs, "Runs behind simulate-mode observed");
  syn->add_option("--out", syn_out, "Output directory");

  // sweep
  auto* swp = app.add_subcommand("sweep", "Rerun both methods across temporal resolutions");
  std::string swp_config_path, swp_observed;
  std::vector<std::int64_t> swp_dts{600, 3600, 7200};
  std::optional<std::uint64_t> swp_seed;
  std::optional<int> swp_threads;
  std::optional<std::string> swp_out;
  swp->add_option("--config", swp_config_path, "Config JSON path")->required();
  swp->add_option("--observed", swp_observed, "Observed outage CSV")->required();
  swp->add_option("--dts", swp_dts, "Time steps to sweep, seconds")->delimiter(',');
  swp->add_option("--seed", swp_seed, "Master seed override");
  swp->add_option("--threads", swp_threads, "Worker thread cap");
  swp->add_option("--out", swp_out, "Output directory override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (wf->parsed()) return cmd_windfield(wf_track, wf_bbox, wf_cell, wf_dt, wf_out);
    if (sim->parsed()) {
      ScenarioConfig cfg = load_config(sim_config_path);
      if (sim_seed) cfg.master_seed = *sim_seed;
      if (sim_method) cfg.method = *sim_method;
      if (sim_dt) cfg.dt_s = *sim_dt;
      if (sim_threads) cfg.threads = *sim_threads;
      if (sim_out) cfg.out_dir = *sim_out;
      return cmd_simulate(std::move(cfg));
    }
    if (cmp->parsed()) return cmd_compare(cmp_ensembles, cmp_observed, cmp_out);
    if (cal->parsed())
      return cmd_calibrate(cal_observed, cal_windfield, cal_network, cal_out, cal_total);
    if (syn->parsed()) return cmd_synth(syn_params, syn_observed_mode, syn_observed_runs, syn_out);
    if (swp->parsed()) {
      ScenarioConfig cfg = load_config(swp_config_path);
      if (swp_seed) cfg.master_seed = *swp_seed;
      if (swp_threads) cfg.threads = *swp_threads;
      if (swp_out) cfg.out_dir = *swp_out;
      return cmd_sweep(std::move(cfg), swp_dts, swp_observed);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitOk;
}
