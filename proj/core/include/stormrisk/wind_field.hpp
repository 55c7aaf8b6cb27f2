// Parametric asymmetric gust wind fields on a lat/lon raster.
//
// The rotational profile is a Holland-form curve driven by (vmax, rmax);
// asymmetry comes from adding a weighted, rotated translation vector to the
// tangential wind. The profile is pluggable so a different radial model can
// be dropped in without touching the raster machinery.
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "stormrisk/geo.hpp"
#include "stormrisk/timeparse.hpp"
#include "stormrisk/track.hpp"

namespace stormrisk {

inline constexpr double kDefaultGustFactor = 1.49;  // 3-s gust over 1-min sustained

using RotationalProfileFn = double (*)(double r_km, double vmax_ms, double rmax_km,
                                       double shape_b);

// v(r) = vmax * sqrt((rmax/r)^B * exp(1 - (rmax/r)^B)); peak vmax at r = rmax,
// 0 at r = 0. Decays slowly outward (~4 m/s at 2000 km for a 40 m/s storm).
double holland_rotational_speed(double r_km, double vmax_ms, double rmax_km, double shape_b);

struct WindProfileParams {
  double shape_b = 1.3;         // Holland-type shape exponent, > 0
  double asym_alpha = 0.55;     // translation-wind weight, [0, 1]
  double asym_theta_deg = 20.0; // rotation of translation vector, CCW in NH
  RotationalProfileFn profile = holland_rotational_speed;
};

// Magnitude of rotational wind plus weighted rotated translation wind, m/s.
// Tangential direction is counterclockwise for northern-hemisphere storms.
double sustained_wind_at(const LatLon& point, const StormInstant& storm,
                         const WindProfileParams& params);

class WindFieldSeries {
public:
  WindFieldSeries(GeoBox bbox, double cell_size_deg, std::vector<UnixTime> timestamps,
                  std::vector<double> sustained_ms, double gust_factor = kDefaultGustFactor);

  const GeoBox& bbox() const { return bbox_; }
  double cell_size_deg() const { return cell_size_; }
  double gust_factor() const { return gust_factor_; }
  const std::vector<UnixTime>& timestamps() const { return timestamps_; }
  int n_lat() const { return n_lat_; }
  int n_lon() const { return n_lon_; }

  LatLon cell_center(int i, int j) const {
    return {bbox_.lat_min + (i + 0.5) * cell_size_, bbox_.lon_min + (j + 0.5) * cell_size_};
  }
  double sustained_cell(std::size_t step, int i, int j) const {
    return sustained_[(step * n_lat_ + i) * n_lon_ + j];
  }

  // Bilinear interpolation between cell centers at the nearest step <= t.
  // Throws InputError(out_of_bounds) if the point or time is not covered.
  double sustained_at(const LatLon& point, UnixTime t) const;
  double gust_at(const LatLon& point, UnixTime t) const { return gust_factor_ * sustained_at(point, t); }

  std::size_t step_at_or_before(UnixTime t) const;

  // One CSV per step (lat,lon,sustained_ms,gust_ms) plus manifest.json.
  void save(const std::filesystem::path& dir) const;
  static WindFieldSeries load(const std::filesystem::path& dir);

  static int grid_cells(double lo, double hi, double cell_size);

private:
  GeoBox bbox_;
  double cell_size_;
  double gust_factor_;
  std::vector<UnixTime> timestamps_;
  int n_lat_;
  int n_lon_;
  std::vector<double> sustained_;  // step-major, then lat row, then lon
};

// Deterministic: one raster per interpolated track step, each cell holding
// sustained_wind_at(cell center).
WindFieldSeries generate_wind_fields(const TcTrack& track, const GeoBox& bbox,
                                     double cell_size_deg, std::int64_t dt_s,
                                     const WindProfileParams& params = {},
                                     double gust_factor = kDefaultGustFactor);

}  // namespace stormrisk
