#include "stormrisk/analytics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>

#include <nlohmann/json.hpp>

#include "stormrisk/errors.hpp"
#include "stormrisk/mathstat.hpp"

namespace stormrisk {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

std::map<std::string, ObservedOutageSeries> parse_observed(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(Errc::malformed_file, "cannot open observed file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("timestamp_iso8601,region,outage_pct", 0) != 0)
    throw InputError(Errc::malformed_file,
                     "observed header must be timestamp_iso8601,region,outage_pct");

  std::map<std::string, ObservedOutageSeries> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::size_t p1 = line.find(',');
    const std::size_t p2 = line.find(',', p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos)
      throw InputError(Errc::malformed_row, "observed line " + std::to_string(line_no));
    const UnixTime t = parse_iso8601(std::string_view(line).substr(0, p1));
    const std::string region = line.substr(p1 + 1, p2 - p1 - 1);
    double v = 0.0;
    auto sv = std::string_view(line).substr(p2 + 1);
    while (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
    auto [vp, vec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
    if (vec != std::errc{} || vp != sv.data() + sv.size())
      throw InputError(Errc::malformed_row,
                       "observed line " + std::to_string(line_no) + ": bad outage value");
    if (v < 0.0 || v > 100.0)
      throw InputError(Errc::malformed_row,
                       "observed line " + std::to_string(line_no) + ": outage_pct outside [0,100]");
    auto& series = out[region];
    series.region = region;
    if (!series.timestamps.empty() && t <= series.timestamps.back())
      throw InputError(Errc::non_monotonic_time,
                       "observed line " + std::to_string(line_no) + ": timestamp not increasing");
    series.timestamps.push_back(t);
    series.outage_pct.push_back(v);
  }
  return out;
}

void save_observed(const std::map<std::string, ObservedOutageSeries>& series,
                   const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write observed file " + path.string());
  out << "timestamp_iso8601,region,outage_pct\n";
  for (const auto& [region, s] : series)
    for (std::size_t t = 0; t < s.timestamps.size(); ++t)
      out << format_iso8601(s.timestamps[t]) << ',' << region << ',' << fmt_double(s.outage_pct[t])
          << '\n';
}

namespace {

// Step-and-hold resample of the observed trace onto the ensemble grid.
std::vector<double> align_observed(const ObservedOutageSeries& observed,
                                   const std::vector<UnixTime>& grid) {
  if (grid.size() > observed.timestamps.size())
    throw InputError(Errc::timestamp_mismatch,
                     "ensemble grid is finer than the observed series (" +
                         std::to_string(grid.size()) + " vs " +
                         std::to_string(observed.timestamps.size()) + " timestamps)");
  std::vector<double> vals(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    auto it = std::upper_bound(observed.timestamps.begin(), observed.timestamps.end(), grid[k]);
    if (it == observed.timestamps.begin())
      throw InputError(Errc::timestamp_mismatch,
                       "observed series starts after ensemble timestamp " +
                           format_iso8601(grid[k]));
    vals[k] = observed.outage_pct[std::distance(observed.timestamps.begin(), it) - 1];
  }
  return vals;
}

}  // namespace

double avg_rmse(const ObservedOutageSeries& observed, const OutageEnsemble& ensemble) {
  const std::vector<double> obs = align_observed(observed, ensemble.timestamps);
  const std::size_t n_steps = ensemble.timestamps.size();
  double total = 0.0;
  for (int j = 0; j < ensemble.n_runs; ++j) {
    double sq = 0.0;
    for (std::size_t t = 0; t < n_steps; ++t) {
      const double d = obs[t] - ensemble.at(j, t);
      sq += d * d;
    }
    total += std::sqrt(sq / static_cast<double>(n_steps));
  }
  return total / static_cast<double>(ensemble.n_runs);
}

double nearest_rank_quantile(std::vector<double> values, double level) {
  if (values.empty()) throw InputError(Errc::insufficient_points, "quantile of empty sample");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<long long>(values.size());
  long long idx = std::llround(level * static_cast<double>(n - 1));
  idx = std::clamp(idx, 0ll, n - 1);
  return values[static_cast<std::size_t>(idx)];
}

const std::vector<double>& BandSeries::level_trace(double level) const {
  for (std::size_t k = 0; k < levels.size(); ++k)
    if (levels[k] == level) return quantiles[k];
  throw std::out_of_range("no such quantile level in band series");
}

BandSeries quantile_bands(const OutageEnsemble& ensemble, std::vector<double> levels) {
  BandSeries bands;
  bands.timestamps = ensemble.timestamps;
  bands.levels = levels;
  const std::size_t n_steps = ensemble.timestamps.size();
  bands.mean.resize(n_steps);
  bands.quantiles.assign(levels.size(), std::vector<double>(n_steps));

  for (double level : levels) {
    const double tail = std::min(level, 1.0 - level);
    if (tail > 0.0 && ensemble.n_runs < static_cast<int>(std::ceil(1.0 / tail)))
      bands.warnings.push_back("level " + fmt_double(level) + " under-resolved with " +
                               std::to_string(ensemble.n_runs) + " runs");
  }

  std::vector<double> column(ensemble.n_runs);
  for (std::size_t t = 0; t < n_steps; ++t) {
    double sum = 0.0;
    for (int j = 0; j < ensemble.n_runs; ++j) {
      column[j] = ensemble.at(j, t);
      sum += column[j];
    }
    bands.mean[t] = sum / static_cast<double>(ensemble.n_runs);
    std::sort(column.begin(), column.end());
    for (std::size_t k = 0; k < levels.size(); ++k) {
      const auto n = static_cast<long long>(column.size());
      long long idx = std::llround(levels[k] * static_cast<double>(n - 1));
      idx = std::clamp(idx, 0ll, n - 1);
      bands.quantiles[k][t] = column[static_cast<std::size_t>(idx)];
    }
  }
  return bands;
}

namespace {

struct NelderMeadResult {
  double x0 = 0.0, x1 = 0.0, f = 0.0;
  int iterations = 0;
};

NelderMeadResult nelder_mead_2d(const std::function<double(double, double)>& f, double x0,
                                double x1, double step0, double step1, int max_iter) {
  struct Vertex {
    double a, b, f;
  };
  std::array<Vertex, 3> simplex{Vertex{x0, x1, f(x0, x1)},
                                Vertex{x0 + step0, x1, f(x0 + step0, x1)},
                                Vertex{x0, x1 + step1, f(x0, x1 + step1)}};
  auto by_f = [](const Vertex& u, const Vertex& v) { return u.f < v.f; };
  int it = 0;
  for (; it < max_iter; ++it) {
    std::sort(simplex.begin(), simplex.end(), by_f);
    const Vertex& best = simplex[0];
    Vertex& worst = simplex[2];
    const double fspread = std::fabs(worst.f - best.f);
    const double xspread = std::fabs(worst.a - best.a) + std::fabs(worst.b - best.b);
    if (fspread < 1e-18 && xspread < 1e-12) break;

    const double ca = (simplex[0].a + simplex[1].a) / 2.0;
    const double cb = (simplex[0].b + simplex[1].b) / 2.0;
    const double ra = ca + (ca - worst.a);
    const double rb = cb + (cb - worst.b);
    const double fr = f(ra, rb);
    if (fr < best.f) {
      const double ea = ca + 2.0 * (ca - worst.a);
      const double eb = cb + 2.0 * (cb - worst.b);
      const double fe = f(ea, eb);
      if (fe < fr)
        worst = {ea, eb, fe};
      else
        worst = {ra, rb, fr};
    } else if (fr < simplex[1].f) {
      worst = {ra, rb, fr};
    } else {
      const double oa = ca + 0.5 * ((fr < worst.f ? ra : worst.a) - ca);
      const double ob = cb + 0.5 * ((fr < worst.f ? rb : worst.b) - cb);
      const double fo = f(oa, ob);
      if (fo < std::min(fr, worst.f)) {
        worst = {oa, ob, fo};
      } else {
        for (int k = 1; k < 3; ++k) {
          simplex[k].a = best.a + 0.5 * (simplex[k].a - best.a);
          simplex[k].b = best.b + 0.5 * (simplex[k].b - best.b);
          simplex[k].f = f(simplex[k].a, simplex[k].b);
        }
      }
    }
  }
  std::sort(simplex.begin(), simplex.end(), by_f);
  return {simplex[0].a, simplex[0].b, simplex[0].f, it};
}

}  // namespace

CalibrationResult calibrate_fragility(std::vector<std::pair<double, double>> points) {
  if (points.size() < 3)
    throw InputError(Errc::insufficient_points,
                     "calibration needs at least 3 points, got " + std::to_string(points.size()));
  for (auto& [w, y] : points) {
    if (!(w > 0.0))
      throw InputError(Errc::degenerate_data, "calibration winds must be > 0 mph");
    y = std::clamp(y, 0.001, 0.999);
  }
  const auto [wmin_it, wmax_it] =
      std::minmax_element(points.begin(), points.end(),
                          [](const auto& a, const auto& b) { return a.first < b.first; });
  if (!(wmax_it->first > wmin_it->first * (1.0 + 1e-12)))
    throw InputError(Errc::degenerate_data, "all calibration winds are equal");

  std::sort(points.begin(), points.end());

  // Initial lambda: log of the wind where the outage fraction crosses 1/2,
  // linearly interpolated; fall back to a probit regression when the data
  // never crosses.
  double lambda0 = 0.0;
  bool have_crossing = false;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const auto [w0, y0] = points[k];
    const auto [w1, y1] = points[k + 1];
    if ((y0 - 0.5) * (y1 - 0.5) <= 0.0 && y0 != y1) {
      const double u = (0.5 - y0) / (y1 - y0);
      lambda0 = std::log(w0 + u * (w1 - w0));
      have_crossing = true;
      break;
    }
  }
  if (!have_crossing) {
    double sz = 0.0, slw = 0.0;
    for (const auto& [w, y] : points) {
      sz += norm_ppf(y);
      slw += std::log(w);
    }
    lambda0 = slw / points.size() - 0.3 * (sz / points.size());
  }
  const double beta0 = 0.3;

  // beta = 0.01 + exp(s) keeps the scale positive and bounded away from a
  // degenerate step function.
  auto beta_of = [](double s) { return 0.01 + std::exp(s); };
  auto objective = [&](double lambda, double s) {
    const double beta = beta_of(s);
    double sq = 0.0;
    for (const auto& [w, y] : points) {
      const double d = norm_cdf((std::log(w) - lambda) / beta) - y;
      sq += d * d;
    }
    return sq;
  };

  NelderMeadResult r = nelder_mead_2d(objective, lambda0, std::log(beta0 - 0.01), 0.1, 0.2, 2000);
  // Restart once from the best point with a fresh simplex to escape any
  // premature shrink.
  NelderMeadResult r2 = nelder_mead_2d(objective, r.x0, r.x1, 0.02, 0.05, 2000);

  CalibrationResult out;
  out.params.lambda = r2.x0;
  out.params.beta = beta_of(r2.x1);
  out.residual = r2.f;
  out.iterations = r.iterations + r2.iterations;
  return out;
}

std::vector<SweepEntry> resolution_sweep(const Network& net,
                                         const RegionFragilityTable& fragility,
                                         const TcTrack& track, const GeoBox& bbox,
                                         double cell_size_deg, const WindProfileParams& profile,
                                         const SimulationConfig& base_cfg,
                                         const std::vector<std::int64_t>& dts,
                                         const ObservedOutageSeries& observed) {
  std::vector<SweepEntry> out;
  for (std::int64_t dt : dts) {
    SimulationConfig cfg = base_cfg;
    cfg.dt_s = dt;
    cfg.validate();
    const WindFieldSeries wind = generate_wind_fields(track, bbox, cell_size_deg, dt, profile);
    for (Method m : {Method::hrsra, Method::smc}) {
      cfg.method = m;
      const OutageEnsemble ens = run_simulation(net, fragility, wind, cfg);
      out.push_back({m, dt, avg_rmse(observed, ens)});
    }
  }
  return out;
}

void save_sweep_csv(const std::vector<SweepEntry>& entries, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write sweep csv " + path.string());
  out << "method,dt_s,avg_rmse\n";
  for (const auto& e : entries)
    out << method_name(e.method) << ',' << e.dt_s << ',' << fmt_double(e.avg_rmse) << '\n';
}

namespace {

void write_band_csv(const BandSeries& bands, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write band csv " + path.string());
  out << "timestamp,mean,q01,q99\n";
  const auto& q01 = bands.level_trace(0.01);
  const auto& q99 = bands.level_trace(0.99);
  for (std::size_t t = 0; t < bands.timestamps.size(); ++t)
    out << format_iso8601(bands.timestamps[t]) << ',' << fmt_double(bands.mean[t]) << ','
        << fmt_double(q01[t]) << ',' << fmt_double(q99[t]) << '\n';
}

nlohmann::json bands_to_json(const BandSeries& bands) {
  nlohmann::json j;
  nlohmann::json ts = nlohmann::json::array();
  for (UnixTime t : bands.timestamps) ts.push_back(format_iso8601(t));
  j["timestamps"] = std::move(ts);
  j["mean"] = bands.mean;
  for (std::size_t k = 0; k < bands.levels.size(); ++k)
    j["q" + fmt_double(bands.levels[k])] = bands.quantiles[k];
  if (!bands.warnings.empty()) j["warnings"] = bands.warnings;
  return j;
}

}  // namespace

void ComparisonReport::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  nlohmann::json j;
  j["method"] = method;
  j["avg_rmse"] = avg_rmse_total;
  j["bands"] = bands_to_json(bands_total);
  if (!per_region.empty()) {
    nlohmann::json jr;
    for (const auto& [region, cmp] : per_region) {
      jr[region] = {{"avg_rmse", cmp.avg_rmse}, {"bands", bands_to_json(cmp.bands)}};
    }
    j["per_region"] = std::move(jr);
  }
  if (!resolution_table.empty()) {
    nlohmann::json jt = nlohmann::json::array();
    for (const auto& e : resolution_table)
      jt.push_back({{"method", method_name(e.method)}, {"dt_s", e.dt_s}, {"avg_rmse", e.avg_rmse}});
    j["resolution_table"] = std::move(jt);
  }
  std::ofstream out(dir / "report.json");
  if (!out) throw std::runtime_error("cannot write report.json");
  out << j.dump(2) << '\n';

  write_band_csv(bands_total, dir / "bands.csv");
  for (const auto& [region, cmp] : per_region) write_band_csv(cmp.bands, dir / ("bands_" + region + ".csv"));
  if (!resolution_table.empty()) save_sweep_csv(resolution_table, dir / "resolution.csv");
}

ComparisonReport compare_ensemble(const OutageEnsemble& ensemble,
                                  const std::map<std::string, ObservedOutageSeries>& observed) {
  auto total_it = observed.find("total");
  if (total_it == observed.end())
    throw InputError(Errc::missing_region, "observed file has no 'total' series");

  ComparisonReport report;
  report.method = method_name(ensemble.method);
  report.avg_rmse_total = avg_rmse(total_it->second, ensemble);
  report.bands_total = quantile_bands(ensemble);

  for (std::size_t r = 0; r < ensemble.regions.size(); ++r) {
    auto it = observed.find(ensemble.regions[r]);
    if (it == observed.end()) continue;
    // View the regional trajectories as their own ensemble.
    OutageEnsemble regional;
    regional.method = ensemble.method;
    regional.master_seed = ensemble.master_seed;
    regional.n_runs = ensemble.n_runs;
    regional.timestamps = ensemble.timestamps;
    regional.p_fail.resize(static_cast<std::size_t>(ensemble.n_runs) *
                           ensemble.timestamps.size());
    for (int j = 0; j < ensemble.n_runs; ++j)
      for (std::size_t t = 0; t < ensemble.timestamps.size(); ++t)
        regional.p_fail[j * ensemble.timestamps.size() + t] = ensemble.regional_at(j, r, t);
    RegionComparison cmp;
    cmp.avg_rmse = avg_rmse(it->second, regional);
    cmp.bands = quantile_bands(regional);
    report.per_region.emplace(ensemble.regions[r], std::move(cmp));
  }
  return report;
}

}  // namespace stormrisk
