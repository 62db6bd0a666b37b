#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "qsim/errors.hpp"
#include "qsim/orbit.hpp"

using qsim::DataError;
using qsim::ElevRange;
using qsim::EphemerisSample;
using qsim::GroundStation;
using qsim::PassWindow;
using qsim::circular_pass;
using qsim::elevation_range;
using qsim::horizon_distance_km;
using qsim::kEarthRadiusKm;
using qsim::load_ephemeris;
using qsim::orbital_period_s;
using qsim::pass_windows;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = std::string("qsim_orbit_test_") + std::to_string(counter++) + ".csv";
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

const GroundStation kEquator{"equator", 0.0, 0.0, 0.0};

}  // namespace

TEST_CASE("satellite directly overhead") {
  const ElevRange er = elevation_range(0.0, 0.0, 550.0, kEquator);
  CHECK(er.elevation_deg == doctest::Approx(90.0).epsilon(1e-9));
  CHECK(er.range_km == doctest::Approx(550.0).epsilon(1e-12));
}

TEST_CASE("five degrees of central angle at 550 km") {
  const ElevRange er = elevation_range(5.0, 0.0, 550.0, kEquator);
  CHECK(er.elevation_deg == doctest::Approx(40.9624038).epsilon(1e-8));
  CHECK(er.range_km == doctest::Approx(798.7988564).epsilon(1e-8));
}

TEST_CASE("range and elevation satisfy the triangle identity") {
  // r_sat^2 = range^2 + r_stn^2 + 2 range r_stn sin(el) for any geometry.
  const GroundStation stn{"x", 48.8566, 2.3522, 0.0};
  for (double lat : {40.0, 48.0, 52.0, 60.0}) {
    for (double lon : {-10.0, 2.0, 14.0}) {
      const ElevRange er = elevation_range(lat, lon, 550.0, stn);
      const double r_sat = kEarthRadiusKm + 550.0;
      const double r_stn = kEarthRadiusKm + stn.alt_m / 1000.0;
      const double el = er.elevation_deg * M_PI / 180.0;
      const double lhs = r_sat * r_sat;
      const double rhs = er.range_km * er.range_km + r_stn * r_stn +
                         2.0 * er.range_km * r_stn * std::sin(el);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("orbital period at 550 km") {
  CHECK(orbital_period_s(550.0) == doctest::Approx(5730.127).epsilon(2e-6));
  CHECK_THROWS_AS(orbital_period_s(-6371.0), std::invalid_argument);
}

TEST_CASE("horizon distance between a balloon pair") {
  CHECK(horizon_distance_km(10.0, 10.0) ==
        doctest::Approx(713.9187628855).epsilon(1e-10));
  CHECK(horizon_distance_km(0.0, 0.0) == 0.0);
  CHECK_THROWS_AS(horizon_distance_km(-1.0, 10.0), std::invalid_argument);
}

TEST_CASE("circular pass starts at the ascending node and samples inclusively") {
  const std::vector<GroundStation> stations{kEquator};
  const auto samples = circular_pass(550.0, 90.0, 0.0, 0.0, 100.0, stations, 10.0);
  REQUIRE(samples.size() == 11);
  CHECK(samples.front().t_s == 0.0);
  CHECK(samples.back().t_s == 100.0);
  // t = 0: satellite crosses (lat 0, lon 0), i.e. directly over the station.
  CHECK(samples.front().stations[0].elevation_deg == doctest::Approx(90.0).epsilon(1e-6));
  CHECK(samples.front().stations[0].range_km == doctest::Approx(550.0).epsilon(1e-9));
  // elevation drops as it moves away on a polar track.
  CHECK(samples[1].stations[0].elevation_deg < 90.0);
  CHECK(samples[2].stations[0].elevation_deg < samples[1].stations[0].elevation_deg);
}

TEST_CASE("ephemeris layout with subsatellite points") {
  TempFile f(
      "# comment\n"
      "t_s,sat_lat_deg,sat_lon_deg,sat_alt_km\n"
      "0,0.0,0.0,550.0\n"
      "10,5.0,0.0,550.0\n");
  const auto samples = load_ephemeris(f.path, {kEquator});
  REQUIRE(samples.size() == 2);
  CHECK(samples[0].t_s == 0.0);
  CHECK(samples[0].stations[0].elevation_deg == doctest::Approx(90.0).epsilon(1e-9));
  CHECK(samples[1].stations[0].elevation_deg == doctest::Approx(40.9624038).epsilon(1e-8));
  CHECK(samples[1].stations[0].range_km == doctest::Approx(798.7988564).epsilon(1e-8));
}

TEST_CASE("ephemeris layout with per-station rows") {
  const GroundStation a{"paris", 48.8566, 2.3522, 0.0};
  const GroundStation b{"delft", 52.0116, 4.3571, 0.0};
  TempFile f(
      "t_s,station,elevation_deg,range_km\n"
      "0,paris,30.0,1000.0\n"
      "0,delft,40.0,900.0\n"
      "10,delft,45.0,850.0\n"
      "10,paris,35.0,950.0\n");
  const auto samples = load_ephemeris(f.path, {a, b});
  REQUIRE(samples.size() == 2);
  CHECK(samples[0].stations[0].elevation_deg == 30.0);
  CHECK(samples[0].stations[1].range_km == 900.0);
  CHECK(samples[1].stations[0].elevation_deg == 35.0);
  CHECK(samples[1].stations[1].elevation_deg == 45.0);
}

TEST_CASE("ephemeris errors carry line numbers") {
  const GroundStation a{"paris", 48.8566, 2.3522, 0.0};
  auto error_message = [&](const std::string& contents) {
    TempFile f(contents);
    try {
      load_ephemeris(f.path, {a});
    } catch (const DataError& e) {
      return std::string(e.what());
    }
    return std::string();
  };

  SUBCASE("unrecognised header") {
    const std::string msg = error_message("time,lat,lon,alt\n0,0,0,550\n");
    CHECK(msg.find("header") != std::string::npos);
  }
  SUBCASE("non-monotonic time") {
    const std::string msg = error_message(
        "t_s,sat_lat_deg,sat_lon_deg,sat_alt_km\n0,0,0,550\n0,1,0,550\n");
    CHECK(msg.find(":3") != std::string::npos);
  }
  SUBCASE("latitude out of range") {
    const std::string msg = error_message(
        "t_s,sat_lat_deg,sat_lon_deg,sat_alt_km\n0,95,0,550\n");
    CHECK(msg.find(":2") != std::string::npos);
  }
  SUBCASE("elevation out of range") {
    const std::string msg = error_message(
        "t_s,station,elevation_deg,range_km\n0,paris,95,1000\n");
    CHECK(msg.find(":2") != std::string::npos);
  }
  SUBCASE("unknown station") {
    const std::string msg = error_message(
        "t_s,station,elevation_deg,range_km\n0,tokyo,30,1000\n");
    CHECK(msg.find("tokyo") != std::string::npos);
  }
  SUBCASE("duplicate station at one time") {
    const std::string msg = error_message(
        "t_s,station,elevation_deg,range_km\n0,paris,30,1000\n0,paris,31,990\n");
    CHECK(msg.find(":3") != std::string::npos);
  }
  SUBCASE("missing station at one time") {
    const GroundStation b{"delft", 52.0116, 4.3571, 0.0};
    TempFile f(
        "t_s,station,elevation_deg,range_km\n"
        "0,paris,30,1000\n"
        "10,paris,31,990\n10,delft,40,900\n");
    CHECK_THROWS_AS(load_ephemeris(f.path, {a, b}), DataError);
  }
  SUBCASE("malformed number") {
    const std::string msg = error_message(
        "t_s,sat_lat_deg,sat_lon_deg,sat_alt_km\n0,zero,0,550\n");
    CHECK(msg.find(":2") != std::string::npos);
  }
  SUBCASE("wrong field count") {
    const std::string msg = error_message(
        "t_s,sat_lat_deg,sat_lon_deg,sat_alt_km\n0,0,0\n");
    CHECK(msg.find(":2") != std::string::npos);
  }
}

TEST_CASE("pass windows are maximal runs above the mask") {
  // Elevations per sample for two stations.
  auto sample = [](double t, double e0, double e1) {
    EphemerisSample s;
    s.t_s = t;
    s.stations = {ElevRange{e0, 1000.0}, ElevRange{e1, 1000.0}};
    return s;
  };
  const std::vector<EphemerisSample> samples{
      sample(0, 10, 50),  sample(10, 25, 50), sample(20, 40, 50),
      sample(30, 15, 50), sample(40, 30, 5),  sample(50, 35, 25),
      sample(60, 5, 25)};

  SUBCASE("single-station mask") {
    const auto w = pass_windows(samples, 20.0, {0});
    REQUIRE(w.size() == 2);
    CHECK(w[0].first == 1);
    CHECK(w[0].last == 2);
    CHECK(w[1].first == 4);
    CHECK(w[1].last == 5);
  }
  SUBCASE("joint visibility: empty required list means every station") {
    const auto w = pass_windows(samples, 20.0, {});
    REQUIRE(w.size() == 2);
    CHECK(w[0].first == 1);
    CHECK(w[0].last == 2);
    CHECK(w[1].first == 5);
    CHECK(w[1].last == 5);
  }
  SUBCASE("windows never overlap and stay ordered") {
    const auto w = pass_windows(samples, 20.0, {0, 1});
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      CHECK(w[i].last < w[i + 1].first);
    }
    for (const auto& win : w) CHECK(win.first <= win.last);
  }
  SUBCASE("mask nobody reaches") {
    CHECK(pass_windows(samples, 89.0, {}).empty());
  }
  SUBCASE("station index out of range") {
    CHECK_THROWS_AS(pass_windows(samples, 20.0, {7}), std::invalid_argument);
  }
  SUBCASE("non-increasing time is rejected") {
    std::vector<EphemerisSample> bad{sample(0, 10, 10), sample(0, 20, 20)};
    CHECK_THROWS_AS(pass_windows(bad, 20.0, {}), std::invalid_argument);
  }
}
