// Tropical cyclone track: parsing, validation and time interpolation.
#pragma once

#include <filesystem>
#include <vector>

#include "stormrisk/geo.hpp"
#include "stormrisk/timeparse.hpp"

namespace stormrisk {

struct TcTrackPoint {
  UnixTime timestamp = 0;
  double lat = 0.0;     // degrees, [-90, 90]
  double lon = 0.0;     // degrees, [-180, 180]
  double vmax_ms = 0.0; // max sustained wind, m/s, >= 0
  double rmax_km = 0.0; // radius of maximum wind, km, > 0
};

struct TcTrack {
  std::vector<TcTrackPoint> points;  // timestamps strictly increasing, size >= 2

  UnixTime start() const { return points.front().timestamp; }
  UnixTime end() const { return points.back().timestamp; }
};

// Throws InputError on invariant violations (see errors.hpp for the codes).
void validate_track(const TcTrack& track);

// CSV schema (header required):
//   timestamp_iso8601,lat_deg,lon_deg,vmax_ms,rmax_km
// Rows with missing or unparsable fields are rejected with their line number.
TcTrack parse_track(const std::filesystem::path& path);

void save_track(const TcTrack& track, const std::filesystem::path& path);

// Resamples to start, start+dt, ... plus the original end point if it does
// not land on the grid. All fields linearly interpolated in time; native
// points that fall on the grid are preserved bit-exactly.
TcTrack interpolate_track(const TcTrack& track, std::int64_t dt_s);

// Storm state at one instant of an interpolated track, together with the
// finite-difference translation velocity (central where possible).
struct StormInstant {
  TcTrackPoint point;
  double trans_east_ms = 0.0;
  double trans_north_ms = 0.0;
};

std::vector<StormInstant> storm_instants(const TcTrack& interpolated);

}  // namespace stormrisk
