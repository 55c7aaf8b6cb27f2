#include <doctest.h>

#include <fstream>
#include <set>

#include "stormrisk/errors.hpp"
#include "stormrisk/network.hpp"
#include "stormrisk/synth.hpp"
#include "test_util.hpp"

using namespace stormrisk;

namespace {

std::filesystem::path write_file(const std::string& tag, const std::string& name,
                                 const std::string& body) {
  auto dir = testutil::fresh_dir("net_" + tag);
  auto path = dir / name;
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("three-feeder fixture parses with two regions") {
  const Network net = parse_network(testutil::data_path("network_3feeder.json"));
  CHECK(net.feeders.size() == 3);
  CHECK(net.regions.size() == 2);
  CHECK(net.feeders[0].poles.size() == 3);
  CHECK(net.total_load_at(0) == doctest::Approx(40.0));
}

TEST_CASE("duplicate feeder id is rejected") {
  auto path = write_file("dup", "net.json", R"({
    "regions": ["Ponce"],
    "feeders": [
      {"id": "F1", "region": "Ponce", "load_mw": 1.0, "poles": [[18.0, -66.6]]},
      {"id": "F1", "region": "Ponce", "load_mw": 2.0, "poles": [[18.1, -66.5]]}
    ]})");
  try {
    parse_network(path);
    FAIL("expected DuplicateFeederId");
  } catch (const InputError& e) {
    CHECK(e.code() == Errc::duplicate_feeder_id);
    CHECK(std::string(e.what()).find("F1") != std::string::npos);
  }
}

TEST_CASE("unknown region and empty poles are rejected") {
  auto bad_region = write_file("region", "net.json", R"({
    "regions": ["Ponce"],
    "feeders": [{"id": "F1", "region": "Atlantis", "load_mw": 1.0, "poles": [[18.0, -66.6]]}]})");
  try {
    parse_network(bad_region);
    FAIL("expected UnknownRegion");
  } catch (const InputError& e) {
    CHECK(e.code() == Errc::unknown_region);
  }

  auto no_poles = write_file("poles", "net.json", R"({
    "regions": ["Ponce"],
    "feeders": [{"id": "F1", "region": "Ponce", "load_mw": 1.0, "poles": []}]})");
  try {
    parse_network(no_poles);
    FAIL("expected EmptyPoles");
  } catch (const InputError& e) {
    CHECK(e.code() == Errc::empty_poles);
  }
}

TEST_CASE("garbage json raises MalformedFile") {
  auto path = write_file("garbage", "net.json", "{not json");
  try {
    parse_network(path);
    FAIL("expected MalformedFile");
  } catch (const InputError& e) {
    CHECK(e.code() == Errc::malformed_file);
  }
}

TEST_CASE("synthetic island-scale fixture has 936 feeders") {
  SynthParams params;
  auto dir = testutil::fresh_dir("synth936");
  const Network net = synth_network(params);
  save_network(net, dir / "net.json");
  const Network parsed = parse_network(dir / "net.json");
  CHECK(parsed.feeders.size() == 936);
  CHECK(parsed.regions.size() == 7);
  CHECK(parsed.total_load_at(0) == doctest::Approx(2751.0).epsilon(1e-9));
  std::set<std::string> subs;
  for (const auto& f : parsed.feeders) subs.insert(f.substation_id);
  CHECK(subs.size() == 312);  // 3 feeders per substation
}

TEST_CASE("network round-trips through save and parse") {
  const Network net = parse_network(testutil::data_path("network_3feeder.json"));
  auto dir = testutil::fresh_dir("net_roundtrip");
  save_network(net, dir / "copy.json");
  const Network again = parse_network(dir / "copy.json");
  REQUIRE(again.feeders.size() == net.feeders.size());
  CHECK(again.regions == net.regions);
  for (std::size_t i = 0; i < net.feeders.size(); ++i) {
    CHECK(again.feeders[i].id == net.feeders[i].id);
    CHECK(again.feeders[i].region == net.feeders[i].region);
    CHECK(again.feeders[i].load_mw == net.feeders[i].load_mw);
    REQUIRE(again.feeders[i].poles.size() == net.feeders[i].poles.size());
    for (std::size_t p = 0; p < net.feeders[i].poles.size(); ++p) {
      CHECK(again.feeders[i].poles[p].lat == net.feeders[i].poles[p].lat);
      CHECK(again.feeders[i].poles[p].lon == net.feeders[i].poles[p].lon);
    }
  }
}

TEST_CASE("regional loads partition the total") {
  const Network net = synth_network({});
  double total = 0.0;
  std::map<std::string, double> by_region;
  for (const auto& f : net.feeders) {
    total += f.load_mw;
    by_region[f.region] += f.load_mw;
  }
  double partition = 0.0;
  for (const auto& [_, v] : by_region) partition += v;
  CHECK(partition == doctest::Approx(total).epsilon(1e-12));
  CHECK(total == doctest::Approx(2751.0).epsilon(1e-9));
}

TEST_CASE("fragility table parses the published rows") {
  const RegionFragilityTable table = parse_fragility(testutil::data_path("fragility_pr.csv"));
  CHECK(table.at("Ponce").lambda == 4.7084);
  CHECK(table.at("Ponce").beta == 0.4379);
  CHECK(table.at("Arecibo").lambda == 5.0150);
  CHECK(table.at("Arecibo").beta == 0.8574);
  CHECK(table.entries().size() == 7);
}

TEST_CASE("zero beta is rejected") {
  auto path = write_file("beta", "frag.csv", "region,lambda,beta\nPonce,4.7,0\n");
  try {
    parse_fragility(path);
    FAIL("expected NonPositiveBeta");
  } catch (const InputError& e) {
    CHECK(e.code() == Errc::non_positive_beta);
  }
}

TEST_CASE("implausible median is rejected unless overridden") {
  auto path = write_file("median", "frag.csv", "region,lambda,beta\nPonce,1.0,0.3\n");
  CHECK_THROWS_AS(parse_fragility(path), InputError);
  const RegionFragilityTable table = parse_fragility(path, /*allow_unusual_median=*/true);
  CHECK(table.at("Ponce").lambda == 1.0);
}

TEST_CASE("missing region surfaces through require_covers") {
  const Network net = parse_network(testutil::data_path("network_3feeder.json"));
  RegionFragilityTable table;
  table.set("Ponce", {4.7084, 0.4379});
  try {
    table.require_covers(net);
    FAIL("expected MissingRegion");
  } catch (const InputError& e) {
    CHECK(e.code() == Errc::missing_region);
    CHECK(std::string(e.what()).find("Caguas") != std::string::npos);
  }
}

TEST_CASE("feeder design wind is the max gust over poles") {
  // two-step field with a horizontal gradient: west cell 20/1.49, east cell
  // 35/1.49 sustained, so gusts are 20 and 35
  GeoBox bbox{18.0, 18.1, -66.2, -66.0};
  const WindFieldSeries wind(bbox, 0.1, {0}, {20.0 / 1.49, 35.0 / 1.49});

  Feeder single;
  single.id = "F1";
  single.region = "Ponce";
  single.load_mw = 1.0;
  single.poles = {{18.05, -66.15}};
  CHECK(feeder_design_wind(single, wind, 0) ==
        doctest::Approx(wind.gust_at({18.05, -66.15}, 0)).epsilon(1e-15));

  Feeder both = single;
  both.poles = {{18.05, -66.15}, {18.05, -66.05}};
  CHECK(feeder_design_wind(both, wind, 0) == doctest::Approx(35.0).epsilon(1e-12));

  // monotone: adding a pole never decreases the design wind
  Feeder more = both;
  more.poles.push_back({18.05, -66.1});
  CHECK(feeder_design_wind(more, wind, 0) >= feeder_design_wind(both, wind, 0));
}

TEST_CASE("feeder straddling rmax outdraws one entirely outside") {
  TcTrack track;
  track.points = {{0, 18.05, -66.6, 40.0, 30.0}, {3600, 18.05, -66.6, 40.0, 30.0}};
  GeoBox bbox{17.6, 18.5, -66.8, -65.0};
  const WindFieldSeries wind = generate_wind_fields(track, bbox, 0.02, 3600);

  // rmax is 30 km, about 0.285 degrees of longitude at this latitude
  Feeder straddling;
  straddling.id = "A";
  straddling.region = "Ponce";
  straddling.load_mw = 1.0;
  straddling.poles = {{18.05, -66.35}, {18.05, -66.30}, {18.05, -66.25}};

  Feeder outside = straddling;
  outside.id = "B";
  outside.poles = {{18.05, -65.60}, {18.05, -65.55}, {18.05, -65.50}};

  CHECK(feeder_design_wind(straddling, wind, 0) > feeder_design_wind(outside, wind, 0));
}

TEST_CASE("load curves are stepped and held") {
  Feeder f;
  f.load_mw = 5.0;
  f.load_curve = {{0, 5.0}, {600, 8.0}, {1200, 2.0}};
  CHECK(f.load_at(0) == 5.0);
  CHECK(f.load_at(599) == 5.0);
  CHECK(f.load_at(600) == 8.0);
  CHECK(f.load_at(5000) == 2.0);
  Feeder plain;
  plain.load_mw = 3.0;
  CHECK(plain.load_at(99999) == 3.0);
}

TEST_CASE("pole outside declared bbox is rejected") {
  auto path = write_file("bbox", "net.json", R"({
    "regions": ["Ponce"],
    "bbox": {"lat_min": 18.0, "lat_max": 18.2, "lon_min": -66.4, "lon_max": -66.0},
    "feeders": [{"id": "F1", "region": "Ponce", "load_mw": 1.0, "poles": [[17.0, -66.2]]}]})");
  try {
    parse_network(path);
    FAIL("expected OutOfBounds");
  } catch (const InputError& e) {
    CHECK(e.code() == Errc::out_of_bounds);
  }
}
