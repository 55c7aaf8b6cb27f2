#include "stormrisk/network.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

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

}  // namespace

double Feeder::load_at(UnixTime t) const {
  if (load_curve.empty()) return load_mw;
  double v = load_curve.front().second;
  for (const auto& [ts, mw] : load_curve) {
    if (ts > t) break;
    v = mw;
  }
  return v;
}

double Network::total_load_at(UnixTime t) const {
  double total = 0.0;
  for (const auto& f : feeders) total += f.load_at(t);
  return total;
}

const FragilityParams& RegionFragilityTable::at(const std::string& region) const {
  auto it = table_.find(region);
  if (it == table_.end())
    throw InputError(Errc::missing_region, "no fragility parameters for region '" + region + "'");
  return it->second;
}

void RegionFragilityTable::require_covers(const Network& net) const {
  for (const auto& r : net.regions)
    if (!has(r))
      throw InputError(Errc::missing_region, "fragility table missing region '" + r + "'");
}

Network parse_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(Errc::malformed_file, "cannot open network file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(Errc::malformed_file, "network json: " + std::string(e.what()));
  }

  Network net;
  try {
    for (const auto& r : j.at("regions")) net.regions.push_back(r.get<std::string>());
    if (j.contains("bbox")) {
      net.bbox.lat_min = j["bbox"].at("lat_min").get<double>();
      net.bbox.lat_max = j["bbox"].at("lat_max").get<double>();
      net.bbox.lon_min = j["bbox"].at("lon_min").get<double>();
      net.bbox.lon_max = j["bbox"].at("lon_max").get<double>();
      net.has_bbox = true;
    }
    std::set<std::string> region_set(net.regions.begin(), net.regions.end());
    std::set<std::string> seen_ids;
    for (const auto& jf : j.at("feeders")) {
      Feeder f;
      f.id = jf.at("id").get<std::string>();
      f.substation_id = jf.value("substation_id", std::string{});
      f.region = jf.at("region").get<std::string>();
      f.load_mw = jf.at("load_mw").get<double>();
      if (!seen_ids.insert(f.id).second)
        throw InputError(Errc::duplicate_feeder_id, "feeder id '" + f.id + "' appears twice");
      if (region_set.find(f.region) == region_set.end())
        throw InputError(Errc::unknown_region,
                         "feeder '" + f.id + "' references unknown region '" + f.region + "'");
      if (!(f.load_mw >= 0.0) || !std::isfinite(f.load_mw))
        throw InputError(Errc::malformed_file,
                         "feeder '" + f.id + "': load_mw must be finite and >= 0");
      for (const auto& p : jf.at("poles")) {
        LatLon ll{p.at(0).get<double>(), p.at(1).get<double>()};
        if (net.has_bbox && !net.bbox.contains(ll))
          throw InputError(Errc::out_of_bounds,
                           "feeder '" + f.id + "': pole outside configured bbox");
        f.poles.push_back(ll);
      }
      if (f.poles.empty())
        throw InputError(Errc::empty_poles, "feeder '" + f.id + "' has no poles");
      if (jf.contains("load_curve")) {
        for (const auto& e : jf["load_curve"])
          f.load_curve.emplace_back(parse_iso8601(e.at(0).get<std::string>()),
                                    e.at(1).get<double>());
        if (!std::is_sorted(f.load_curve.begin(), f.load_curve.end(),
                            [](const auto& a, const auto& b) { return a.first < b.first; }))
          throw InputError(Errc::non_monotonic_time,
                           "feeder '" + f.id + "': load_curve timestamps must increase");
      }
      net.feeders.push_back(std::move(f));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(Errc::malformed_file, "network json: " + std::string(e.what()));
  }
  return net;
}

void save_network(const Network& net, const std::filesystem::path& path) {
  nlohmann::json j;
  j["regions"] = net.regions;
  if (net.has_bbox)
    j["bbox"] = {{"lat_min", net.bbox.lat_min},
                 {"lat_max", net.bbox.lat_max},
                 {"lon_min", net.bbox.lon_min},
                 {"lon_max", net.bbox.lon_max}};
  nlohmann::json feeders = nlohmann::json::array();
  for (const auto& f : net.feeders) {
    nlohmann::json jf;
    jf["id"] = f.id;
    jf["substation_id"] = f.substation_id;
    jf["region"] = f.region;
    jf["load_mw"] = f.load_mw;
    nlohmann::json poles = nlohmann::json::array();
    for (const auto& p : f.poles) poles.push_back({p.lat, p.lon});
    jf["poles"] = std::move(poles);
    if (!f.load_curve.empty()) {
      nlohmann::json curve = nlohmann::json::array();
      for (const auto& [ts, mw] : f.load_curve) curve.push_back({format_iso8601(ts), mw});
      jf["load_curve"] = std::move(curve);
    }
    feeders.push_back(std::move(jf));
  }
  j["feeders"] = std::move(feeders);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write network file " + path.string());
  out << j.dump(2) << '\n';
}

RegionFragilityTable parse_fragility(const std::filesystem::path& path,
                                     bool allow_unusual_median) {
  std::ifstream in(path);
  if (!in) throw InputError(Errc::malformed_file, "cannot open fragility file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("region,lambda,beta", 0) != 0)
    throw InputError(Errc::malformed_file, "fragility header must be region,lambda,beta");

  RegionFragilityTable table;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::size_t p1 = line.find(',');
    std::size_t p2 = line.find(',', p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos)
      throw InputError(Errc::malformed_row,
                       "line " + std::to_string(line_no) + ": expected region,lambda,beta");
    const std::string region = line.substr(0, p1);
    FragilityParams params;
    auto parse_field = [&](std::size_t from, std::size_t to) {
      std::string_view sv(line);
      sv = sv.substr(from, to - from);
      while (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
      if (ec != std::errc{} || ptr != sv.data() + sv.size())
        throw InputError(Errc::malformed_row, "line " + std::to_string(line_no) +
                                                  ": bad numeric field '" + std::string(sv) + "'");
      return v;
    };
    params.lambda = parse_field(p1 + 1, p2);
    params.beta = parse_field(p2 + 1, line.size());
    if (!(params.beta > 0.0))
      throw InputError(Errc::non_positive_beta, "region '" + region + "': beta must be > 0");
    const double median = std::exp(params.lambda);
    if (!allow_unusual_median && (median < FragilityParams::kMedianSanityLoMph ||
                                  median > FragilityParams::kMedianSanityHiMph))
      throw InputError(Errc::malformed_row,
                       "region '" + region + "': median resistance " + std::to_string(median) +
                           " mph outside sanity range (pass allow_unusual_median to override)");
    table.set(region, params);
  }
  return table;
}

void save_fragility(const RegionFragilityTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write fragility file " + path.string());
  out << "region,lambda,beta\n";
  for (const auto& [region, params] : table.entries())
    out << region << ',' << fmt_double(params.lambda) << ',' << fmt_double(params.beta) << '\n';
}

double feeder_design_wind(const Feeder& feeder, const WindFieldSeries& series, UnixTime t) {
  double w = 0.0;
  for (const auto& pole : feeder.poles) w = std::max(w, series.gust_at(pole, t));
  return w;
}

}  // namespace stormrisk
