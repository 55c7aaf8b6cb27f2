#include "stormrisk/track.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "stormrisk/errors.hpp"

namespace stormrisk {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, int line_no) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first != last && *first == ' ') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw InputError(Errc::malformed_row,
                     "line " + std::to_string(line_no) + ": bad numeric field '" + s + "'");
  return v;
}

TcTrackPoint lerp_point(const TcTrackPoint& a, const TcTrackPoint& b, UnixTime t) {
  const double u = static_cast<double>(t - a.timestamp) /
                   static_cast<double>(b.timestamp - a.timestamp);
  TcTrackPoint p;
  p.timestamp = t;
  p.lat = a.lat + u * (b.lat - a.lat);
  p.lon = a.lon + u * (b.lon - a.lon);
  p.vmax_ms = a.vmax_ms + u * (b.vmax_ms - a.vmax_ms);
  p.rmax_km = a.rmax_km + u * (b.rmax_km - a.rmax_km);
  return p;
}

}  // namespace

void validate_track(const TcTrack& track) {
  if (track.points.size() < 2)
    throw InputError(Errc::empty_track, "track needs at least 2 points, got " +
                                            std::to_string(track.points.size()));
  for (std::size_t i = 0; i < track.points.size(); ++i) {
    const auto& p = track.points[i];
    if (p.lat < -90.0 || p.lat > 90.0 || p.lon < -180.0 || p.lon > 180.0)
      throw InputError(Errc::malformed_row, "point " + std::to_string(i) + ": lat/lon out of bounds");
    if (!(p.vmax_ms >= 0.0))
      throw InputError(Errc::malformed_row, "point " + std::to_string(i) + ": vmax must be >= 0");
    if (!(p.rmax_km > 0.0))
      throw InputError(Errc::malformed_row, "point " + std::to_string(i) + ": rmax must be > 0");
    if (i > 0 && track.points[i].timestamp <= track.points[i - 1].timestamp)
      throw InputError(Errc::non_monotonic_time,
                       "point " + std::to_string(i) + ": timestamps must strictly increase");
  }
}

TcTrack parse_track(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(Errc::malformed_file, "cannot open track file " + path.string());

  std::string line;
  if (!std::getline(in, line))
    throw InputError(Errc::malformed_file, "track file is empty: " + path.string());
  {
    auto header = split_csv(line);
    if (header.size() != 5 || header[0] != "timestamp_iso8601" || header[1] != "lat_deg" ||
        header[2] != "lon_deg" || header[3] != "vmax_ms" || header[4] != "rmax_km")
      throw InputError(Errc::malformed_file,
                       "track header must be timestamp_iso8601,lat_deg,lon_deg,vmax_ms,rmax_km");
  }

  TcTrack track;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv(line);
    if (fields.size() != 5)
      throw InputError(Errc::malformed_row,
                       "line " + std::to_string(line_no) + ": expected 5 fields, got " +
                           std::to_string(fields.size()));
    for (const auto& f : fields)
      if (f.empty())
        throw InputError(Errc::malformed_row,
                         "line " + std::to_string(line_no) + ": missing field");
    TcTrackPoint p;
    try {
      p.timestamp = parse_iso8601(fields[0]);
    } catch (const InputError& e) {
      throw InputError(Errc::malformed_row, "line " + std::to_string(line_no) + ": " + e.what());
    }
    p.lat = parse_double(fields[1], line_no);
    p.lon = parse_double(fields[2], line_no);
    p.vmax_ms = parse_double(fields[3], line_no);
    p.rmax_km = parse_double(fields[4], line_no);
    if (p.lat < -90.0 || p.lat > 90.0 || p.lon < -180.0 || p.lon > 180.0 || p.vmax_ms < 0.0 ||
        p.rmax_km <= 0.0)
      throw InputError(Errc::malformed_row,
                       "line " + std::to_string(line_no) + ": field out of valid range");
    if (!track.points.empty() && p.timestamp <= track.points.back().timestamp)
      throw InputError(Errc::non_monotonic_time,
                       "line " + std::to_string(line_no) + ": timestamp not increasing");
    track.points.push_back(p);
  }
  if (track.points.size() < 2)
    throw InputError(Errc::empty_track, "track file has " + std::to_string(track.points.size()) +
                                            " data rows, need at least 2");
  return track;
}

void save_track(const TcTrack& track, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write track file " + path.string());
  out << "timestamp_iso8601,lat_deg,lon_deg,vmax_ms,rmax_km\n";
  char buf[128];
  for (const auto& p : track.points) {
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,%.10g", p.lat, p.lon, p.vmax_ms, p.rmax_km);
    out << format_iso8601(p.timestamp) << ',' << buf << '\n';
  }
}

TcTrack interpolate_track(const TcTrack& track, std::int64_t dt_s) {
  if (dt_s <= 0) throw InputError(Errc::non_positive_dt, "dt must be > 0 seconds");
  validate_track(track);

  TcTrack out;
  std::size_t seg = 0;
  for (UnixTime t = track.start();; t += dt_s) {
    if (t > track.end()) break;
    while (track.points[seg + 1].timestamp < t) ++seg;
    if (t == track.points[seg].timestamp) {
      out.points.push_back(track.points[seg]);
    } else if (t == track.points[seg + 1].timestamp) {
      out.points.push_back(track.points[seg + 1]);
    } else {
      out.points.push_back(lerp_point(track.points[seg], track.points[seg + 1], t));
    }
  }
  if (out.points.back().timestamp != track.end()) out.points.push_back(track.points.back());
  return out;
}

std::vector<StormInstant> storm_instants(const TcTrack& interpolated) {
  const auto& pts = interpolated.points;
  std::vector<StormInstant> out(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const std::size_t lo = (k == 0) ? 0 : k - 1;
    const std::size_t hi = (k + 1 == pts.size()) ? k : k + 1;
    double east_km = 0.0, north_km = 0.0;
    local_displacement_km({pts[lo].lat, pts[lo].lon}, {pts[hi].lat, pts[hi].lon}, east_km,
                          north_km);
    const double dt = static_cast<double>(pts[hi].timestamp - pts[lo].timestamp);
    out[k].point = pts[k];
    out[k].trans_east_ms = east_km * 1000.0 / dt;
    out[k].trans_north_ms = north_km * 1000.0 / dt;
  }
  return out;
}

}  // namespace stormrisk
