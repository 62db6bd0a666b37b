#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace qsim {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kEarthMuKm3S2 = 398600.4418;
inline constexpr double kEarthRotationRadS = 7.2921159e-5;

struct GroundStation {
  std::string name;
  double lat_deg;
  double lon_deg;
  double alt_m;
};

struct ElevRange {
  double elevation_deg;
  double range_km;
};

// Spherical-Earth elevation and slant range from a station to a satellite
// at the given subsatellite point and altitude.
ElevRange elevation_range(double sat_lat_deg, double sat_lon_deg,
                          double sat_alt_km, const GroundStation& station);

struct EphemerisSample {
  double t_s;
  std::vector<ElevRange> stations;  // same order as the station list
};

// Loads a satellite track. Two layouts are accepted:
//   t_s,sat_lat_deg,sat_lon_deg,sat_alt_km     (geometry computed per station)
//   t_s,station,elevation_deg,range_km         (one row per station per time)
// '#' starts a comment; times must be strictly increasing.
std::vector<EphemerisSample> load_ephemeris(const std::string& path,
                                            const std::vector<GroundStation>& stations);

double orbital_period_s(double sat_alt_km);

// Circular two-body orbit over a rotating Earth, sampled every step_s from
// t0_s to t1_s inclusive. The satellite crosses the ascending node (latitude
// 0, geographic longitude raan_deg) at t = 0.
std::vector<EphemerisSample> circular_pass(double sat_alt_km, double incl_deg,
                                           double raan_deg, double t0_s, double t1_s,
                                           const std::vector<GroundStation>& stations,
                                           double step_s = 10.0);

struct PassWindow {
  std::size_t first;  // inclusive sample indices
  std::size_t last;
};

// Maximal runs of consecutive samples in which every required station sees
// the satellite at or above mask_deg.
std::vector<PassWindow> pass_windows(const std::vector<EphemerisSample>& samples,
                                     double mask_deg,
                                     const std::vector<std::size_t>& required_stations);

// Maximum line-of-sight ground distance (km) between platforms at the two
// altitudes, sqrt(2 R h1) + sqrt(2 R h2).
double horizon_distance_km(double alt1_km, double alt2_km);

}  // namespace qsim
