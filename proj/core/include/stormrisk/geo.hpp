// Geographic primitives: points, bounding boxes, great-circle distance.
#pragma once

#include <algorithm>
#include <cmath>

namespace stormrisk {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

struct LatLon {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]
};

struct GeoBox {
  double lat_min = 0.0;
  double lat_max = 0.0;
  double lon_min = 0.0;
  double lon_max = 0.0;

  bool contains(const LatLon& p) const {
    return p.lat >= lat_min && p.lat <= lat_max && p.lon >= lon_min && p.lon <= lon_max;
  }
  bool degenerate() const { return !(lat_min < lat_max) || !(lon_min < lon_max); }
};

inline double haversine_km(const LatLon& a, const LatLon& b) {
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dphi = (b.lat - a.lat) * kDegToRad;
  const double dlam = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlam / 2.0);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

// Local east/north displacement (km) from `from` to `to` on a spherical
// earth, using the cosine of the origin latitude for the east component.
// Adequate for the short baselines of track finite differences.
inline void local_displacement_km(const LatLon& from, const LatLon& to, double& east_km,
                                  double& north_km) {
  north_km = kEarthRadiusKm * (to.lat - from.lat) * kDegToRad;
  east_km = kEarthRadiusKm * std::cos(from.lat * kDegToRad) * (to.lon - from.lon) * kDegToRad;
}

}  // namespace stormrisk
