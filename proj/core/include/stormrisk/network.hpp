// Distribution network description: feeders, poles, loads, regions, and the
// per-region fragility parameter table.
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "stormrisk/fragility.hpp"
#include "stormrisk/geo.hpp"
#include "stormrisk/timeparse.hpp"
#include "stormrisk/wind_field.hpp"

namespace stormrisk {

struct Feeder {
  std::string id;
  std::string substation_id;
  std::string region;
  std::vector<LatLon> poles;  // non-empty
  double load_mw = 0.0;       // peak demand, >= 0

  // Optional demand curve; step-and-hold lookup. Empty means constant load.
  std::vector<std::pair<UnixTime, double>> load_curve;

  double load_at(UnixTime t) const;
};

struct Network {
  std::vector<std::string> regions;
  std::vector<Feeder> feeders;
  GeoBox bbox;       // optional in the file; all-zero when absent
  bool has_bbox = false;

  double total_load_at(UnixTime t) const;
};

class RegionFragilityTable {
public:
  void set(const std::string& region, FragilityParams params) { table_[region] = params; }
  const FragilityParams& at(const std::string& region) const;
  bool has(const std::string& region) const { return table_.count(region) != 0; }
  const std::map<std::string, FragilityParams>& entries() const { return table_; }

  // Throws InputError(missing_region) naming the first uncovered region.
  void require_covers(const Network& net) const;

private:
  std::map<std::string, FragilityParams> table_;
};

// JSON schema: {"regions": [...], "bbox": {...}?, "feeders": [{id,
// substation_id, region, load_mw, poles: [[lat,lon],...], load_curve?}]}.
Network parse_network(const std::filesystem::path& path);
void save_network(const Network& net, const std::filesystem::path& path);

// CSV schema: region,lambda,beta (header required). beta must be > 0 and
// exp(lambda) within [10, 500] mph unless allow_unusual_median is set.
RegionFragilityTable parse_fragility(const std::filesystem::path& path,
                                     bool allow_unusual_median = false);
void save_fragility(const RegionFragilityTable& table, const std::filesystem::path& path);

// Design exposure of a feeder: max gust over its poles at time t, m/s.
// Any pole or line failing blacks out the whole feeder, so the worst pole
// governs.
double feeder_design_wind(const Feeder& feeder, const WindFieldSeries& series, UnixTime t);

}  // namespace stormrisk
