// Shared helpers for the unit suites.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "stormrisk/fragility.hpp"
#include "stormrisk/network.hpp"
#include "stormrisk/wind_field.hpp"

#ifndef STORMRISK_TEST_DATA
#error "STORMRISK_TEST_DATA must be defined by the build"
#endif

namespace testutil {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(STORMRISK_TEST_DATA) / name;
}

inline std::filesystem::path fresh_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("stormrisk_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline constexpr double kLat = 18.05;
inline constexpr double kLon = -66.05;

// One-cell raster covering a small box around (kLat, kLon); every query
// inside returns the step's value.
inline stormrisk::WindFieldSeries uniform_wind(const std::vector<double>& sustained_ms,
                                               std::int64_t dt_s = 600,
                                               stormrisk::UnixTime t0 = 0,
                                               double gust_factor = 1.49) {
  stormrisk::GeoBox bbox{kLat - 0.05, kLat + 0.05, kLon - 0.05, kLon + 0.05};
  std::vector<stormrisk::UnixTime> ts;
  for (std::size_t k = 0; k < sustained_ms.size(); ++k)
    ts.push_back(t0 + static_cast<std::int64_t>(k) * dt_s);
  return stormrisk::WindFieldSeries(bbox, 0.1, ts, sustained_ms, gust_factor);
}

// Sustained m/s value whose design gust equals the requested mph.
inline double sustained_for_gust_mph(double gust_mph, double gust_factor = 1.49) {
  return gust_mph / stormrisk::kMphPerMs / gust_factor;
}

inline stormrisk::Network single_feeder_network(const std::string& region = "SanJuan",
                                                double load_mw = 10.0) {
  stormrisk::Network net;
  net.regions = {region};
  stormrisk::Feeder f;
  f.id = "F1";
  f.substation_id = "S1";
  f.region = region;
  f.load_mw = load_mw;
  f.poles = {{kLat, kLon}};
  net.feeders.push_back(f);
  return net;
}

inline stormrisk::RegionFragilityTable table_with(const std::string& region, double lambda,
                                                  double beta) {
  stormrisk::RegionFragilityTable t;
  t.set(region, {lambda, beta});
  return t;
}

}  // namespace testutil
