#include "stormrisk/wind_field.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "stormrisk/errors.hpp"

namespace stormrisk {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

double parse_double_strict(std::string_view s, const std::string& ctx) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw InputError(Errc::malformed_row, ctx + ": bad numeric field '" + std::string(s) + "'");
  return v;
}

}  // namespace

double holland_rotational_speed(double r_km, double vmax_ms, double rmax_km, double shape_b) {
  if (r_km <= 0.0) return 0.0;
  const double x = std::pow(rmax_km / r_km, shape_b);
  return vmax_ms * std::sqrt(x * std::exp(1.0 - x));
}

double sustained_wind_at(const LatLon& point, const StormInstant& storm,
                         const WindProfileParams& params) {
  const LatLon center{storm.point.lat, storm.point.lon};
  const double r_km = haversine_km(center, point);
  const double v_rot = params.profile(r_km, storm.point.vmax_ms, storm.point.rmax_km,
                                      params.shape_b);

  // Southern-hemisphere storms spin clockwise; flip tangential and rotation
  // senses with the sign of the storm latitude.
  const double hemi = storm.point.lat >= 0.0 ? 1.0 : -1.0;

  double wind_e = 0.0, wind_n = 0.0;
  if (r_km > 0.0 && v_rot > 0.0) {
    double de_km = 0.0, dn_km = 0.0;
    local_displacement_km(center, point, de_km, dn_km);
    const double norm = std::sqrt(de_km * de_km + dn_km * dn_km);
    if (norm > 0.0) {
      const double ue = de_km / norm;
      const double un = dn_km / norm;
      wind_e = v_rot * (-un) * hemi;
      wind_n = v_rot * ue * hemi;
    }
  }

  const double theta = hemi * params.asym_theta_deg * kDegToRad;
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  const double te = storm.trans_east_ms * ct - storm.trans_north_ms * st;
  const double tn = storm.trans_east_ms * st + storm.trans_north_ms * ct;
  wind_e += params.asym_alpha * te;
  wind_n += params.asym_alpha * tn;

  return std::sqrt(wind_e * wind_e + wind_n * wind_n);
}

int WindFieldSeries::grid_cells(double lo, double hi, double cell_size) {
  const double span = hi - lo;
  const int n = static_cast<int>(std::ceil(span / cell_size - 1e-9));
  return std::max(1, n);
}

WindFieldSeries::WindFieldSeries(GeoBox bbox, double cell_size_deg,
                                 std::vector<UnixTime> timestamps,
                                 std::vector<double> sustained_ms, double gust_factor)
    : bbox_(bbox),
      cell_size_(cell_size_deg),
      gust_factor_(gust_factor),
      timestamps_(std::move(timestamps)),
      n_lat_(grid_cells(bbox.lat_min, bbox.lat_max, cell_size_deg)),
      n_lon_(grid_cells(bbox.lon_min, bbox.lon_max, cell_size_deg)),
      sustained_(std::move(sustained_ms)) {
  if (bbox_.degenerate() || !(cell_size_ > 0.0))
    throw InputError(Errc::invalid_config, "wind field bbox/cell_size invalid");
  if (timestamps_.empty())
    throw InputError(Errc::invalid_config, "wind field needs at least one time step");
  if (!std::is_sorted(timestamps_.begin(), timestamps_.end()) ||
      std::adjacent_find(timestamps_.begin(), timestamps_.end()) != timestamps_.end())
    throw InputError(Errc::invalid_config, "wind field timestamps must strictly increase");
  const std::size_t expect =
      timestamps_.size() * static_cast<std::size_t>(n_lat_) * static_cast<std::size_t>(n_lon_);
  if (sustained_.size() != expect)
    throw InputError(Errc::invalid_config,
                     "raster size " + std::to_string(sustained_.size()) + " != expected " +
                         std::to_string(expect));
  for (double v : sustained_)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw InputError(Errc::invalid_config, "wind values must be finite and >= 0");
}

std::size_t WindFieldSeries::step_at_or_before(UnixTime t) const {
  if (t < timestamps_.front() || t > timestamps_.back())
    throw InputError(Errc::out_of_bounds,
                     "time " + format_iso8601(t) + " outside wind field range [" +
                         format_iso8601(timestamps_.front()) + ", " +
                         format_iso8601(timestamps_.back()) + "]");
  auto it = std::upper_bound(timestamps_.begin(), timestamps_.end(), t);
  return static_cast<std::size_t>(std::distance(timestamps_.begin(), it)) - 1;
}

double WindFieldSeries::sustained_at(const LatLon& point, UnixTime t) const {
  if (!bbox_.contains(point))
    throw InputError(Errc::out_of_bounds, "point (" + std::to_string(point.lat) + ", " +
                                              std::to_string(point.lon) + ") outside bbox");
  const std::size_t step = step_at_or_before(t);

  // Continuous index in cell-center coordinates, clamped so edge half-cells
  // hold the boundary value.
  const double x = (point.lat - bbox_.lat_min) / cell_size_ - 0.5;
  const double y = (point.lon - bbox_.lon_min) / cell_size_ - 0.5;
  const int i0 = std::clamp(static_cast<int>(std::floor(x)), 0, std::max(0, n_lat_ - 2));
  const int j0 = std::clamp(static_cast<int>(std::floor(y)), 0, std::max(0, n_lon_ - 2));
  const int i1 = std::min(i0 + 1, n_lat_ - 1);
  const int j1 = std::min(j0 + 1, n_lon_ - 1);
  const double fx = std::clamp(x - i0, 0.0, 1.0);
  const double fy = std::clamp(y - j0, 0.0, 1.0);

  const double v00 = sustained_cell(step, i0, j0);
  const double v01 = sustained_cell(step, i0, j1);
  const double v10 = sustained_cell(step, i1, j0);
  const double v11 = sustained_cell(step, i1, j1);
  return (1.0 - fx) * ((1.0 - fy) * v00 + fy * v01) + fx * ((1.0 - fy) * v10 + fy * v11);
}

WindFieldSeries generate_wind_fields(const TcTrack& track, const GeoBox& bbox,
                                     double cell_size_deg, std::int64_t dt_s,
                                     const WindProfileParams& params, double gust_factor) {
  if (bbox.degenerate())
    throw InputError(Errc::invalid_config, "bbox is degenerate");
  if (!(cell_size_deg > 0.0))
    throw InputError(Errc::invalid_config, "cell_size must be > 0");

  const TcTrack fine = interpolate_track(track, dt_s);
  const auto instants = storm_instants(fine);

  const int n_lat = WindFieldSeries::grid_cells(bbox.lat_min, bbox.lat_max, cell_size_deg);
  const int n_lon = WindFieldSeries::grid_cells(bbox.lon_min, bbox.lon_max, cell_size_deg);

  std::vector<UnixTime> timestamps(instants.size());
  std::vector<double> sustained(instants.size() * static_cast<std::size_t>(n_lat) *
                                static_cast<std::size_t>(n_lon));
  std::size_t idx = 0;
  for (std::size_t s = 0; s < instants.size(); ++s) {
    timestamps[s] = instants[s].point.timestamp;
    for (int i = 0; i < n_lat; ++i) {
      const double lat = bbox.lat_min + (i + 0.5) * cell_size_deg;
      for (int j = 0; j < n_lon; ++j) {
        const double lon = bbox.lon_min + (j + 0.5) * cell_size_deg;
        sustained[idx++] = sustained_wind_at({lat, lon}, instants[s], params);
      }
    }
  }
  return WindFieldSeries(bbox, cell_size_deg, std::move(timestamps), std::move(sustained),
                         gust_factor);
}

void WindFieldSeries::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["bbox"] = {{"lat_min", bbox_.lat_min},
                      {"lat_max", bbox_.lat_max},
                      {"lon_min", bbox_.lon_min},
                      {"lon_max", bbox_.lon_max}};
  manifest["cell_size_deg"] = cell_size_;
  manifest["gust_factor"] = gust_factor_;
  manifest["n_lat"] = n_lat_;
  manifest["n_lon"] = n_lon_;
  nlohmann::json ts = nlohmann::json::array();
  nlohmann::json files = nlohmann::json::array();
  char name[32];
  for (std::size_t s = 0; s < timestamps_.size(); ++s) {
    ts.push_back(format_iso8601(timestamps_[s]));
    std::snprintf(name, sizeof(name), "wf_%04zu.csv", s);
    files.push_back(name);
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << "lat,lon,sustained_ms,gust_ms\n";
    for (int i = 0; i < n_lat_; ++i) {
      for (int j = 0; j < n_lon_; ++j) {
        const LatLon c = cell_center(i, j);
        const double v = sustained_cell(s, i, j);
        out << fmt_double(c.lat) << ',' << fmt_double(c.lon) << ',' << fmt_double(v) << ','
            << fmt_double(gust_factor_ * v) << '\n';
      }
    }
  }
  manifest["timestamps"] = std::move(ts);
  manifest["files"] = std::move(files);
  std::ofstream mout(dir / "manifest.json");
  if (!mout) throw std::runtime_error("cannot write wind field manifest");
  mout << manifest.dump(2) << '\n';
}

WindFieldSeries WindFieldSeries::load(const std::filesystem::path& dir) {
  std::ifstream min(dir / "manifest.json");
  if (!min)
    throw InputError(Errc::malformed_file, "cannot open " + (dir / "manifest.json").string());
  nlohmann::json manifest;
  try {
    min >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(Errc::malformed_file, "wind field manifest: " + std::string(e.what()));
  }

  GeoBox bbox;
  std::vector<UnixTime> timestamps;
  double cell = 0.0, gust = 0.0;
  int n_lat = 0, n_lon = 0;
  std::vector<std::string> files;
  try {
    bbox.lat_min = manifest.at("bbox").at("lat_min").get<double>();
    bbox.lat_max = manifest.at("bbox").at("lat_max").get<double>();
    bbox.lon_min = manifest.at("bbox").at("lon_min").get<double>();
    bbox.lon_max = manifest.at("bbox").at("lon_max").get<double>();
    cell = manifest.at("cell_size_deg").get<double>();
    gust = manifest.at("gust_factor").get<double>();
    n_lat = manifest.at("n_lat").get<int>();
    n_lon = manifest.at("n_lon").get<int>();
    for (const auto& t : manifest.at("timestamps")) timestamps.push_back(parse_iso8601(t.get<std::string>()));
    for (const auto& f : manifest.at("files")) files.push_back(f.get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(Errc::malformed_file, "wind field manifest: " + std::string(e.what()));
  }
  if (files.size() != timestamps.size())
    throw InputError(Errc::malformed_file, "wind field manifest: files/timestamps mismatch");

  std::vector<double> sustained;
  sustained.reserve(files.size() * static_cast<std::size_t>(n_lat) * static_cast<std::size_t>(n_lon));
  for (const auto& f : files) {
    std::ifstream in(dir / f);
    if (!in) throw InputError(Errc::malformed_file, "cannot open " + (dir / f).string());
    std::string line;
    std::getline(in, line);  // header
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      // third field of lat,lon,sustained_ms,gust_ms
      std::size_t p1 = line.find(',');
      std::size_t p2 = line.find(',', p1 + 1);
      std::size_t p3 = line.find(',', p2 + 1);
      if (p1 == std::string::npos || p2 == std::string::npos || p3 == std::string::npos)
        throw InputError(Errc::malformed_row, f + ": bad raster row '" + line + "'");
      sustained.push_back(parse_double_strict(
          std::string_view(line).substr(p2 + 1, p3 - p2 - 1), f));
      ++rows;
    }
    if (rows != static_cast<std::size_t>(n_lat) * static_cast<std::size_t>(n_lon))
      throw InputError(Errc::malformed_file, f + ": row count does not match grid");
  }
  return WindFieldSeries(bbox, cell, std::move(timestamps), std::move(sustained), gust);
}

}  // namespace stormrisk
