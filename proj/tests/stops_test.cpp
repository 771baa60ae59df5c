#include "doctest.h"

#include <cmath>
#include <vector>

#include "hexflow/error.hpp"
#include "hexflow/rng.hpp"
#include "hexflow/stops.hpp"
#include "oracles.hpp"

using namespace hexflow;

namespace {

const GridConfig kGrid{40.7128, -74.006, 3200.0};

// Degrees of latitude per meter on the R=6371000 sphere.
constexpr double kLatPerM = 1.0 / (6371000.0 * M_PI / 180.0);

Ping ping_at(std::int64_t t, double lat, double lon) {
  return Ping{"u", t, lat, lon, HealthStatus::kHealthy};
}

}  // namespace

TEST_CASE("haversine matches known arcs") {
  CHECK(haversine_m(40.7, -74.0, 40.7, -74.0) == 0.0);
  CHECK(haversine_m(0.0, 0.0, 0.0, 1.0) ==
        doctest::Approx(111194.9).epsilon(1e-5));
  CHECK(haversine_m(0.0, 0.0, 1.0, 0.0) ==
        doctest::Approx(haversine_m(0.0, 0.0, 0.0, 1.0)).epsilon(1e-12));
  // Symmetry.
  CHECK(haversine_m(40.7, -74.0, 40.8, -73.9) ==
        haversine_m(40.8, -73.9, 40.7, -74.0));
}

TEST_CASE("medoid picks the geometric middle") {
  const std::vector<GeoPoint> single{{40.7, -74.0}};
  CHECK(medoid_index(single) == 0);

  // Three collinear equally spaced points: the middle one wins.
  const std::vector<GeoPoint> line{
      {40.7, -74.0}, {40.7 + 100 * kLatPerM, -74.0},
      {40.7 + 200 * kLatPerM, -74.0}};
  CHECK(medoid_index(line) == 1);
  const GeoPoint m = medoid(line);
  CHECK(m.lat == line[1].lat);
  CHECK(m.lon == line[1].lon);
}

TEST_CASE("medoid matches the exhaustive oracle with earliest-index ties") {
  Rng rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(8);
    std::vector<GeoPoint> pts;
    for (std::size_t i = 0; i < n; ++i)
      pts.push_back(GeoPoint{40.7 + rng.uniform(-1e-3, 1e-3),
                             -74.0 + rng.uniform(-1e-3, 1e-3)});
    CHECK(medoid_index(pts) == oracle::medoid_index_bruteforce(pts));
  }
  // Two identical points tie; the earlier index must win.
  const std::vector<GeoPoint> dup{{40.7, -74.0}, {40.7, -74.0}};
  CHECK(medoid_index(dup) == 0);
}

TEST_CASE("single ping yields no stop") {
  const std::vector<Ping> traj{ping_at(0, 40.7, -74.0)};
  CHECK(extract_stops(traj, StopParams{}, kGrid).empty());
}

TEST_CASE("stationary pings form one stop with the shared coordinate") {
  const std::vector<Ping> traj{ping_at(0, 40.7, -74.0),
                               ping_at(180, 40.7, -74.0),
                               ping_at(360, 40.7, -74.0)};
  const auto stops = extract_stops(traj, StopParams{}, kGrid);
  REQUIRE(stops.size() == 1);
  CHECK(stops[0].arrival == 0);
  CHECK(stops[0].departure == 360);
  CHECK(stops[0].medoid_lat == 40.7);
  CHECK(stops[0].medoid_lon == -74.0);
  CHECK(stops[0].cell == geo_to_cell(40.7, -74.0, kGrid));
}

TEST_CASE("a drifting walk never accumulates a stop") {
  // Every minute the point moves 100 m north: each new point is outside the
  // 50 m radius, so every cluster dies at duration 0.
  std::vector<Ping> traj;
  for (int i = 0; i < 10; ++i)
    traj.push_back(ping_at(60 * i, 40.7 + i * 100 * kLatPerM, -74.0));
  CHECK(extract_stops(traj, StopParams{}, kGrid).empty());
}

TEST_CASE("a long silence splits one dwell into two stops") {
  std::vector<Ping> traj;
  // 6 minutes of pings, a 10 minute hole, 6 more minutes at the same spot.
  for (int i = 0; i <= 6; ++i) traj.push_back(ping_at(60 * i, 40.7, -74.0));
  for (int i = 0; i <= 6; ++i)
    traj.push_back(ping_at(960 + 60 * i, 40.7, -74.0));
  const auto stops = extract_stops(traj, StopParams{}, kGrid);
  REQUIRE(stops.size() == 2);
  CHECK(stops[0].arrival == 0);
  CHECK(stops[0].departure == 360);
  CHECK(stops[1].arrival == 960);
  CHECK(stops[1].departure == 1320);
}

TEST_CASE("the trailing cluster is flushed at end of scan") {
  // A short bounce away, then a final dwell that only the end-of-scan flush
  // can emit.
  std::vector<Ping> traj{ping_at(0, 40.7, -74.0)};
  for (int i = 0; i <= 6; ++i)
    traj.push_back(ping_at(300 + 60 * i, 40.71, -74.0));
  const auto stops = extract_stops(traj, StopParams{}, kGrid);
  REQUIRE(stops.size() == 1);
  CHECK(stops[0].arrival == 300);
  CHECK(stops[0].departure == 660);
}

TEST_CASE("emitted stops satisfy their structural invariants") {
  Rng rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Ping> traj;
    std::int64_t t = 0;
    double lat = 40.7, lon = -74.0;
    for (int i = 0; i < 60; ++i) {
      t += 30 + rng.uniform_int(400);
      if (rng.bernoulli(0.15)) {
        lat += rng.uniform(-1.0, 1.0) * 2000 * kLatPerM;
        lon += rng.uniform(-1.0, 1.0) * 2000 * kLatPerM;
      } else {
        lat += rng.uniform(-1.0, 1.0) * 20 * kLatPerM;
        lon += rng.uniform(-1.0, 1.0) * 20 * kLatPerM;
      }
      traj.push_back(ping_at(t, lat, lon));
    }
    const auto stops = extract_stops(traj, StopParams{}, kGrid);
    for (std::size_t i = 0; i < stops.size(); ++i) {
      CHECK(stops[i].departure - stops[i].arrival >= 300);
      CHECK(stops[i].cell ==
            geo_to_cell(stops[i].medoid_lat, stops[i].medoid_lon, kGrid));
      if (i + 1 < stops.size())
        CHECK(stops[i].departure <= stops[i + 1].arrival);
    }
  }
}

TEST_CASE("short random trajectories match the simulation oracle exactly") {
  Rng rng(33);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(10);
    std::vector<Ping> traj;
    std::int64_t t = 0;
    double lat = 40.7, lon = -74.0;
    for (std::size_t i = 0; i < n; ++i) {
      t += 30 + rng.uniform_int(500);
      // Mix of small jitters and occasional jumps so both branches fire.
      const double scale = rng.bernoulli(0.3) ? 500.0 : 30.0;
      lat += rng.uniform(-1.0, 1.0) * scale * kLatPerM;
      lon += rng.uniform(-1.0, 1.0) * scale * kLatPerM;
      traj.push_back(ping_at(t, lat, lon));
    }
    const auto got = extract_stops(traj, StopParams{}, kGrid);
    const auto want = oracle::extract_stops_simulation(traj, StopParams{},
                                                       kGrid);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].arrival == want[i].arrival);
      CHECK(got[i].departure == want[i].departure);
      CHECK(got[i].medoid_lat == want[i].medoid_lat);
      CHECK(got[i].medoid_lon == want[i].medoid_lon);
      CHECK(got[i].cell == want[i].cell);
    }
  }
}

TEST_CASE("stop params validation") {
  CHECK_NOTHROW(StopParams{}.validate());
  CHECK_THROWS_AS((StopParams{0.0, 300, 300}.validate()), ConfigError);
  CHECK_THROWS_AS((StopParams{50.0, 0, 300}.validate()), ConfigError);
  CHECK_THROWS_AS((StopParams{50.0, 300, 0}.validate()), ConfigError);
}
