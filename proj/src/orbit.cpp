#include "qsim/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qsim/errors.hpp"

namespace qsim {

namespace {

constexpr double kDegToRad = M_PI / 180.0;
constexpr double kRadToDeg = 180.0 / M_PI;

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_double(const std::string& s, const std::string& path, int lineno) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(path + ":" + std::to_string(lineno) + ": malformed number '" + s + "'");
  }
}

}  // namespace

ElevRange elevation_range(double sat_lat_deg, double sat_lon_deg,
                          double sat_alt_km, const GroundStation& station) {
  if (sat_alt_km < 0.0) throw std::invalid_argument("elevation_range: negative altitude");
  const double phi_s = station.lat_deg * kDegToRad;
  const double phi_t = sat_lat_deg * kDegToRad;
  const double dlon = (sat_lon_deg - station.lon_deg) * kDegToRad;
  double cosc = std::sin(phi_s) * std::sin(phi_t) +
                std::cos(phi_s) * std::cos(phi_t) * std::cos(dlon);
  cosc = std::clamp(cosc, -1.0, 1.0);
  const double sinc = std::sqrt(std::max(0.0, 1.0 - cosc * cosc));

  const double r_stn = kEarthRadiusKm + station.alt_m / 1000.0;
  const double r_sat = kEarthRadiusKm + sat_alt_km;

  ElevRange out{};
  out.elevation_deg = std::atan2(r_sat * cosc - r_stn, r_sat * sinc) * kRadToDeg;
  out.range_km = std::sqrt(std::max(
      0.0, r_sat * r_sat + r_stn * r_stn - 2.0 * r_sat * r_stn * cosc));
  return out;
}

std::vector<EphemerisSample> load_ephemeris(const std::string& path,
                                            const std::vector<GroundStation>& stations) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open ephemeris '" + path + "'");
  if (stations.empty()) throw std::invalid_argument("load_ephemeris: no stations");

  enum class Schema { unknown, track, per_station };
  Schema schema = Schema::unknown;
  std::vector<EphemerisSample> samples;
  std::vector<bool> filled;  // per-station flags for the current per_station group

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv(line);

    if (schema == Schema::unknown) {
      if (fields == std::vector<std::string>{"t_s", "sat_lat_deg", "sat_lon_deg", "sat_alt_km"}) {
        schema = Schema::track;
      } else if (fields == std::vector<std::string>{"t_s", "station", "elevation_deg", "range_km"}) {
        schema = Schema::per_station;
      } else {
        throw DataError(path + ":" + std::to_string(lineno) + ": unrecognised header");
      }
      continue;
    }

    if (fields.size() != 4) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected 4 fields, got " +
                      std::to_string(fields.size()));
    }
    const double t = parse_double(fields[0], path, lineno);

    if (schema == Schema::track) {
      if (!samples.empty() && t <= samples.back().t_s) {
        throw DataError(path + ":" + std::to_string(lineno) + ": time not increasing");
      }
      const double lat = parse_double(fields[1], path, lineno);
      const double lon = parse_double(fields[2], path, lineno);
      const double alt = parse_double(fields[3], path, lineno);
      if (lat < -90.0 || lat > 90.0) {
        throw DataError(path + ":" + std::to_string(lineno) + ": latitude out of range");
      }
      if (alt <= 0.0) {
        throw DataError(path + ":" + std::to_string(lineno) + ": altitude must be > 0");
      }
      EphemerisSample s{};
      s.t_s = t;
      for (const auto& stn : stations) s.stations.push_back(elevation_range(lat, lon, alt, stn));
      samples.push_back(std::move(s));
      continue;
    }

    // per_station rows: one row per station per time, grouped by time.
    const std::string& name = fields[1];
    const double elev = parse_double(fields[2], path, lineno);
    const double range = parse_double(fields[3], path, lineno);
    if (elev < -90.0 || elev > 90.0) {
      throw DataError(path + ":" + std::to_string(lineno) + ": elevation out of range");
    }
    if (range <= 0.0) {
      throw DataError(path + ":" + std::to_string(lineno) + ": range must be > 0");
    }
    std::size_t idx = stations.size();
    for (std::size_t i = 0; i < stations.size(); ++i) {
      if (stations[i].name == name) { idx = i; break; }
    }
    if (idx == stations.size()) {
      throw DataError(path + ":" + std::to_string(lineno) + ": unknown station '" + name + "'");
    }
    if (samples.empty() || t != samples.back().t_s) {
      if (!samples.empty()) {
        if (t < samples.back().t_s) {
          throw DataError(path + ":" + std::to_string(lineno) + ": time not increasing");
        }
        for (std::size_t i = 0; i < stations.size(); ++i) {
          if (!filled[i]) {
            throw DataError(path + ":" + std::to_string(lineno) + ": missing station '" +
                            stations[i].name + "' for t=" + std::to_string(samples.back().t_s));
          }
        }
      }
      EphemerisSample s{};
      s.t_s = t;
      s.stations.assign(stations.size(), ElevRange{});
      samples.push_back(std::move(s));
      filled.assign(stations.size(), false);
    }
    if (filled[idx]) {
      throw DataError(path + ":" + std::to_string(lineno) + ": duplicate station '" + name +
                      "' for t=" + std::to_string(t));
    }
    samples.back().stations[idx] = ElevRange{elev, range};
    filled[idx] = true;
  }

  if (schema == Schema::unknown) throw DataError("ephemeris '" + path + "' has no header");
  if (schema == Schema::per_station && !samples.empty()) {
    for (std::size_t i = 0; i < stations.size(); ++i) {
      if (!filled[i]) {
        throw DataError(path + ": missing station '" + stations[i].name +
                        "' for t=" + std::to_string(samples.back().t_s));
      }
    }
  }
  if (samples.empty()) throw DataError("ephemeris '" + path + "' has no rows");
  return samples;
}

double orbital_period_s(double sat_alt_km) {
  if (sat_alt_km <= 0.0) throw std::invalid_argument("orbital_period_s: altitude must be > 0");
  const double r = kEarthRadiusKm + sat_alt_km;
  return 2.0 * M_PI * std::sqrt(r * r * r / kEarthMuKm3S2);
}

std::vector<EphemerisSample> circular_pass(double sat_alt_km, double incl_deg,
                                           double raan_deg, double t0_s, double t1_s,
                                           const std::vector<GroundStation>& stations,
                                           double step_s) {
  if (t1_s < t0_s) throw std::invalid_argument("circular_pass: t1 < t0");
  if (step_s <= 0.0) throw std::invalid_argument("circular_pass: step must be > 0");
  const double n = 2.0 * M_PI / orbital_period_s(sat_alt_km);
  const double incl = incl_deg * kDegToRad;

  std::vector<EphemerisSample> samples;
  const auto n_steps = static_cast<std::size_t>((t1_s - t0_s) / step_s + 1e-9);
  for (std::size_t i = 0; i <= n_steps; ++i) {
    const double t = t0_s + static_cast<double>(i) * step_s;
    const double u = n * t;
    const double lat = std::asin(std::sin(incl) * std::sin(u)) * kRadToDeg;
    double lon = raan_deg + std::atan2(std::cos(incl) * std::sin(u), std::cos(u)) * kRadToDeg -
                 kEarthRotationRadS * t * kRadToDeg;
    lon = std::remainder(lon, 360.0);
    EphemerisSample s{};
    s.t_s = t;
    for (const auto& stn : stations) {
      s.stations.push_back(elevation_range(lat, lon, sat_alt_km, stn));
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<PassWindow> pass_windows(const std::vector<EphemerisSample>& samples,
                                     double mask_deg,
                                     const std::vector<std::size_t>& required_stations) {
  std::vector<std::size_t> required = required_stations;
  if (required.empty() && !samples.empty()) {
    for (std::size_t i = 0; i < samples.front().stations.size(); ++i) required.push_back(i);
  }
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].t_s <= samples[i - 1].t_s) {
      throw std::invalid_argument("pass_windows: times not increasing");
    }
  }

  std::vector<PassWindow> windows;
  bool open = false;
  PassWindow w{};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    bool visible = true;
    for (const auto idx : required) {
      if (idx >= samples[i].stations.size()) {
        throw std::invalid_argument("pass_windows: station index out of range");
      }
      if (samples[i].stations[idx].elevation_deg < mask_deg) { visible = false; break; }
    }
    if (visible) {
      if (!open) { w.first = i; open = true; }
      w.last = i;
    } else if (open) {
      windows.push_back(w);
      open = false;
    }
  }
  if (open) windows.push_back(w);
  return windows;
}

double horizon_distance_km(double alt1_km, double alt2_km) {
  if (alt1_km < 0.0 || alt2_km < 0.0) {
    throw std::invalid_argument("horizon_distance_km: negative altitude");
  }
  return std::sqrt(2.0 * kEarthRadiusKm * alt1_km) + std::sqrt(2.0 * kEarthRadiusKm * alt2_km);
}

}  // namespace qsim
