#include "stormrisk/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <thread>

#include <nlohmann/json.hpp>

#include "stormrisk/errors.hpp"
#include "stormrisk/fragility.hpp"
#include "stormrisk/rng.hpp"

namespace stormrisk {

std::string method_name(Method m) { return m == Method::hrsra ? "hrsra" : "smc"; }

Method method_from_string(const std::string& name) {
  if (name == "hrsra") return Method::hrsra;
  if (name == "smc") return Method::smc;
  throw InputError(Errc::invalid_config, "unknown method '" + name + "' (want hrsra or smc)");
}

void SimulationConfig::validate() const {
  if (n_runs < 1) throw InputError(Errc::invalid_config, "n_runs must be >= 1");
  if (t_start >= t_end) throw InputError(Errc::invalid_config, "t_start must precede t_end");
  if (dt_s <= 0) throw InputError(Errc::non_positive_dt, "dt must be > 0");
  if ((t_end - t_start) % dt_s != 0)
    throw InputError(Errc::invalid_config,
                     "dt " + std::to_string(dt_s) + " s does not divide the simulated span");
}

std::vector<UnixTime> SimulationConfig::time_grid() const {
  validate();
  std::vector<UnixTime> grid;
  for (UnixTime t = t_start; t <= t_end; t += dt_s) grid.push_back(t);
  return grid;
}

bool OutageEnsemble::failed_at(int run, std::size_t t, int feeder) const {
  const std::size_t words_per_step = (static_cast<std::size_t>(n_feeders) + 63) / 64;
  const std::uint64_t word = status_bits[run][t * words_per_step + feeder / 64];
  return (word >> (feeder % 64)) & 1u;
}

namespace {

struct Precomputed {
  std::vector<UnixTime> grid;
  std::size_t n_steps = 0;
  std::size_t n_feeders = 0;
  std::vector<double> design_wind_mph;  // feeder-major: [i * n_steps + t]
  std::vector<double> fail_prob;        // same layout; SMC only
  std::vector<double> loads;            // [i * n_steps + t]
  std::vector<double> total_load;       // [t]
  std::vector<int> region_index;        // feeder -> region position in net.regions
};

Precomputed precompute(const Network& net, const RegionFragilityTable& fragility,
                       const WindFieldSeries& wind, const SimulationConfig& cfg,
                       bool need_fail_prob) {
  cfg.validate();
  fragility.require_covers(net);
  if (wind.timestamps().front() > cfg.t_start || wind.timestamps().back() < cfg.t_end)
    throw InputError(Errc::coverage_gap,
                     "wind field does not cover the simulation window [" +
                         format_iso8601(cfg.t_start) + ", " + format_iso8601(cfg.t_end) + "]");

  Precomputed pre;
  pre.grid = cfg.time_grid();
  pre.n_steps = pre.grid.size();
  pre.n_feeders = net.feeders.size();

  std::map<std::string, int> region_pos;
  for (std::size_t r = 0; r < net.regions.size(); ++r)
    region_pos[net.regions[r]] = static_cast<int>(r);

  pre.design_wind_mph.resize(pre.n_feeders * pre.n_steps);
  pre.loads.resize(pre.n_feeders * pre.n_steps);
  pre.total_load.assign(pre.n_steps, 0.0);
  pre.region_index.resize(pre.n_feeders);

  for (std::size_t i = 0; i < pre.n_feeders; ++i) {
    const Feeder& f = net.feeders[i];
    pre.region_index[i] = region_pos.at(f.region);
    for (std::size_t t = 0; t < pre.n_steps; ++t) {
      double gust_ms;
      try {
        gust_ms = feeder_design_wind(f, wind, pre.grid[t]);
      } catch (const InputError& e) {
        throw InputError(Errc::coverage_gap,
                         "feeder '" + f.id + "' not covered by wind field: " + e.what());
      }
      pre.design_wind_mph[i * pre.n_steps + t] = gust_ms * kMphPerMs;
      const double load = f.load_at(pre.grid[t]);
      pre.loads[i * pre.n_steps + t] = load;
      pre.total_load[t] += load;
    }
  }
  for (std::size_t t = 0; t < pre.n_steps; ++t)
    if (!(pre.total_load[t] > 0.0))
      throw InputError(Errc::invalid_config, "total system load must be positive at every step");

  if (need_fail_prob) {
    pre.fail_prob.resize(pre.n_feeders * pre.n_steps);
    for (std::size_t i = 0; i < pre.n_feeders; ++i) {
      const FragilityParams& params = fragility.at(net.feeders[i].region);
      for (std::size_t t = 0; t < pre.n_steps; ++t)
        pre.fail_prob[i * pre.n_steps + t] =
            fragility_prob(pre.design_wind_mph[i * pre.n_steps + t], params);
    }
  }
  return pre;
}

void parallel_runs(int n_runs, int threads, const std::function<void(int)>& body) {
  int n_workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (n_workers < 1) n_workers = 1;
  n_workers = std::min(n_workers, n_runs);
  if (n_workers == 1) {
    for (int j = 0; j < n_runs; ++j) body(j);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) {
    pool.emplace_back([&] {
      for (int j = next.fetch_add(1); j < n_runs; j = next.fetch_add(1)) body(j);
    });
  }
  for (auto& th : pool) th.join();
}

// Aggregates one run's failure flags into system (and optionally regional)
// outage percentages. Summation is always in ascending feeder order, so the
// result is independent of when each feeder failed and of worker count.
struct RunAccumulator {
  const Precomputed& pre;
  const std::vector<int>& region_index;
  std::size_t n_regions;
  OutageEnsemble& out;

  void aggregate_step(int run, std::size_t t, const std::vector<std::uint8_t>& failed,
                      std::vector<double>& regional_lost_scratch) const {
    const std::size_t n_steps = pre.n_steps;
    double lost = 0.0;
    if (out.regional_p_fail.empty()) {
      for (std::size_t i = 0; i < pre.n_feeders; ++i)
        if (failed[i]) lost += pre.loads[i * n_steps + t];
    } else {
      auto& reg_lost = regional_lost_scratch;
      std::fill(reg_lost.begin(), reg_lost.end(), 0.0);
      std::vector<double> reg_total(n_regions, 0.0);
      for (std::size_t i = 0; i < pre.n_feeders; ++i) {
        const double load = pre.loads[i * n_steps + t];
        reg_total[region_index[i]] += load;
        if (failed[i]) {
          lost += load;
          reg_lost[region_index[i]] += load;
        }
      }
      for (std::size_t r = 0; r < n_regions; ++r)
        out.regional_p_fail[(run * n_regions + r) * n_steps + t] =
            reg_total[r] > 0.0 ? 100.0 * reg_lost[r] / reg_total[r] : 0.0;
    }
    out.p_fail[run * n_steps + t] = 100.0 * lost / pre.total_load[t];
  }

  void store_status(int run, std::size_t t, const std::vector<std::uint8_t>& failed) const {
    if (out.status_bits.empty()) return;
    const std::size_t words_per_step = (pre.n_feeders + 63) / 64;
    auto& bits = out.status_bits[run];
    for (std::size_t i = 0; i < pre.n_feeders; ++i)
      if (failed[i]) bits[t * words_per_step + i / 64] |= (1ull << (i % 64));
  }
};

OutageEnsemble make_ensemble(Method method, const Network& net, const Precomputed& pre,
                             const SimulationConfig& cfg) {
  OutageEnsemble out;
  out.method = method;
  out.master_seed = cfg.master_seed;
  out.n_runs = cfg.n_runs;
  out.timestamps = pre.grid;
  out.p_fail.assign(static_cast<std::size_t>(cfg.n_runs) * pre.n_steps, 0.0);
  if (cfg.store_regional) {
    out.regions = net.regions;
    out.regional_p_fail.assign(
        static_cast<std::size_t>(cfg.n_runs) * net.regions.size() * pre.n_steps, 0.0);
  }
  out.n_feeders = static_cast<int>(pre.n_feeders);
  if (cfg.store_status) {
    const std::size_t words_per_step = (pre.n_feeders + 63) / 64;
    out.status_bits.assign(cfg.n_runs,
                           std::vector<std::uint64_t>(pre.n_steps * words_per_step, 0));
  }
  return out;
}

}  // namespace

OutageEnsemble run_hrsra(const Network& net, const RegionFragilityTable& fragility,
                         const WindFieldSeries& wind, const SimulationConfig& cfg) {
  Precomputed pre = precompute(net, fragility, wind, cfg, /*need_fail_prob=*/false);

  std::vector<FragilityParams> params(pre.n_feeders);
  for (std::size_t i = 0; i < pre.n_feeders; ++i)
    params[i] = fragility.at(net.feeders[i].region);

  OutageEnsemble out = make_ensemble(Method::hrsra, net, pre, cfg);
  RunAccumulator acc{pre, pre.region_index, net.regions.size(), out};

  parallel_runs(cfg.n_runs, cfg.threads, [&](int run) {
    std::vector<double> resistance(pre.n_feeders);
    for (std::size_t i = 0; i < pre.n_feeders; ++i) {
      const double r = uniform_resistance_draw(cfg.master_seed, static_cast<std::uint64_t>(run),
                                               static_cast<std::uint32_t>(i));
      resistance[i] = sample_resistance(r, params[i]);
    }
    std::vector<std::uint8_t> failed(pre.n_feeders, 0);
    std::vector<double> reg_scratch(net.regions.size(), 0.0);
    for (std::size_t t = 0; t < pre.n_steps; ++t) {
      for (std::size_t i = 0; i < pre.n_feeders; ++i)
        if (!failed[i] && pre.design_wind_mph[i * pre.n_steps + t] > resistance[i])
          failed[i] = 1;
      acc.aggregate_step(run, t, failed, reg_scratch);
      acc.store_status(run, t, failed);
    }
  });
  return out;
}

OutageEnsemble run_smc(const Network& net, const RegionFragilityTable& fragility,
                       const WindFieldSeries& wind, const SimulationConfig& cfg) {
  Precomputed pre = precompute(net, fragility, wind, cfg, /*need_fail_prob=*/true);

  OutageEnsemble out = make_ensemble(Method::smc, net, pre, cfg);
  RunAccumulator acc{pre, pre.region_index, net.regions.size(), out};

  parallel_runs(cfg.n_runs, cfg.threads, [&](int run) {
    std::vector<std::uint8_t> failed(pre.n_feeders, 0);
    std::vector<double> reg_scratch(net.regions.size(), 0.0);
    for (std::size_t t = 0; t < pre.n_steps; ++t) {
      for (std::size_t i = 0; i < pre.n_feeders; ++i) {
        if (failed[i]) continue;  // absorbing; draw skipped, streams are per (feeder, step)
        const double f = pre.fail_prob[i * pre.n_steps + t];
        if (f <= 0.0) continue;
        const double u = uniform_step_draw(cfg.master_seed, static_cast<std::uint64_t>(run),
                                           static_cast<std::uint32_t>(i),
                                           static_cast<std::uint32_t>(t));
        if (u <= f) failed[i] = 1;
      }
      acc.aggregate_step(run, t, failed, reg_scratch);
      acc.store_status(run, t, failed);
    }
  });
  return out;
}

OutageEnsemble run_simulation(const Network& net, const RegionFragilityTable& fragility,
                              const WindFieldSeries& wind, const SimulationConfig& cfg) {
  return cfg.method == Method::hrsra ? run_hrsra(net, fragility, wind, cfg)
                                     : run_smc(net, fragility, wind, cfg);
}

namespace {

std::string fmt_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

void OutageEnsemble::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);

  nlohmann::json summary;
  summary["method"] = method_name(method);
  summary["master_seed"] = master_seed;
  summary["n_runs"] = n_runs;
  summary["outage_unit"] = "percent_of_load";
  summary["rng"] = "philox4x32-10; run j is stream (master_seed, j)";
  nlohmann::json ts = nlohmann::json::array();
  for (UnixTime t : timestamps) ts.push_back(format_iso8601(t));
  summary["timestamps"] = std::move(ts);
  if (!regions.empty()) summary["regions"] = regions;
  {
    std::ofstream out(dir / "summary.json");
    if (!out) throw std::runtime_error("cannot write ensemble summary");
    out << summary.dump(2) << '\n';
  }

  {
    std::ofstream out(dir / "p_fail.csv");
    if (!out) throw std::runtime_error("cannot write p_fail.csv");
    out << "run,timestamp,p_fail_pct\n";
    for (int j = 0; j < n_runs; ++j)
      for (std::size_t t = 0; t < timestamps.size(); ++t)
        out << j << ',' << format_iso8601(timestamps[t]) << ',' << fmt_double(at(j, t)) << '\n';
  }

  if (!regions.empty()) {
    std::ofstream out(dir / "regional.csv");
    if (!out) throw std::runtime_error("cannot write regional.csv");
    out << "run,timestamp,region,p_fail_pct\n";
    for (int j = 0; j < n_runs; ++j)
      for (std::size_t r = 0; r < regions.size(); ++r)
        for (std::size_t t = 0; t < timestamps.size(); ++t)
          out << j << ',' << format_iso8601(timestamps[t]) << ',' << regions[r] << ','
              << fmt_double(regional_at(j, r, t)) << '\n';
  }
}

OutageEnsemble OutageEnsemble::load(const std::filesystem::path& dir) {
  std::ifstream sin(dir / "summary.json");
  if (!sin)
    throw InputError(Errc::malformed_file, "cannot open " + (dir / "summary.json").string());
  nlohmann::json summary;
  try {
    sin >> summary;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(Errc::malformed_file, "ensemble summary: " + std::string(e.what()));
  }

  OutageEnsemble out;
  try {
    out.method = method_from_string(summary.at("method").get<std::string>());
    out.master_seed = summary.at("master_seed").get<std::uint64_t>();
    out.n_runs = summary.at("n_runs").get<int>();
    for (const auto& t : summary.at("timestamps"))
      out.timestamps.push_back(parse_iso8601(t.get<std::string>()));
    if (summary.contains("regions"))
      out.regions = summary["regions"].get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(Errc::malformed_file, "ensemble summary: " + std::string(e.what()));
  }

  const std::size_t n_steps = out.timestamps.size();
  std::map<UnixTime, std::size_t> step_of;
  for (std::size_t t = 0; t < n_steps; ++t) step_of[out.timestamps[t]] = t;
  out.p_fail.assign(static_cast<std::size_t>(out.n_runs) * n_steps, 0.0);

  std::ifstream in(dir / "p_fail.csv");
  if (!in) throw InputError(Errc::malformed_file, "cannot open " + (dir / "p_fail.csv").string());
  std::string line;
  std::getline(in, line);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t p1 = line.find(',');
    const std::size_t p2 = line.find(',', p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos)
      throw InputError(Errc::malformed_row, "p_fail.csv line " + std::to_string(line_no));
    int run = 0;
    auto [rp, rec] = std::from_chars(line.data(), line.data() + p1, run);
    if (rec != std::errc{} || run < 0 || run >= out.n_runs)
      throw InputError(Errc::malformed_row, "p_fail.csv line " + std::to_string(line_no) + ": bad run");
    const UnixTime t = parse_iso8601(std::string_view(line).substr(p1 + 1, p2 - p1 - 1));
    auto it = step_of.find(t);
    if (it == step_of.end())
      throw InputError(Errc::timestamp_mismatch,
                       "p_fail.csv line " + std::to_string(line_no) + ": unknown timestamp");
    double v = 0.0;
    auto sv = std::string_view(line).substr(p2 + 1);
    auto [vp, vec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
    if (vec != std::errc{} || vp != sv.data() + sv.size())
      throw InputError(Errc::malformed_row, "p_fail.csv line " + std::to_string(line_no) + ": bad value");
    out.p_fail[static_cast<std::size_t>(run) * n_steps + it->second] = v;
  }

  if (!out.regions.empty()) {
    out.regional_p_fail.assign(static_cast<std::size_t>(out.n_runs) * out.regions.size() * n_steps,
                               0.0);
    std::map<std::string, std::size_t> region_of;
    for (std::size_t r = 0; r < out.regions.size(); ++r) region_of[out.regions[r]] = r;
    std::ifstream rin(dir / "regional.csv");
    if (!rin)
      throw InputError(Errc::malformed_file, "cannot open " + (dir / "regional.csv").string());
    std::getline(rin, line);
    while (std::getline(rin, line)) {
      if (line.empty()) continue;
      const std::size_t p1 = line.find(',');
      const std::size_t p2 = line.find(',', p1 + 1);
      const std::size_t p3 = line.find(',', p2 + 1);
      if (p1 == std::string::npos || p2 == std::string::npos || p3 == std::string::npos)
        throw InputError(Errc::malformed_row, "regional.csv: bad row '" + line + "'");
      int run = 0;
      std::from_chars(line.data(), line.data() + p1, run);
      const UnixTime t = parse_iso8601(std::string_view(line).substr(p1 + 1, p2 - p1 - 1));
      const std::string region = line.substr(p2 + 1, p3 - p2 - 1);
      double v = 0.0;
      auto sv = std::string_view(line).substr(p3 + 1);
      std::from_chars(sv.data(), sv.data() + sv.size(), v);
      out.regional_p_fail[(static_cast<std::size_t>(run) * out.regions.size() +
                           region_of.at(region)) * n_steps + step_of.at(t)] = v;
    }
  }
  return out;
}

}  // namespace stormrisk
