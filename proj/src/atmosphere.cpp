#include "qsim/atmosphere.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qsim/errors.hpp"

namespace qsim {

Aerosol aerosol_from_string(const std::string& s) {
  if (s == "none") return Aerosol::none;
  if (s == "rural23") return Aerosol::rural23;
  if (s == "rural5") return Aerosol::rural5;
  if (s == "urban5") return Aerosol::urban5;
  if (s == "navy") return Aerosol::navy;
  throw DataError("unknown aerosol model '" + s + "'");
}

std::string aerosol_to_string(Aerosol a) {
  switch (a) {
    case Aerosol::none: return "none";
    case Aerosol::rural23: return "rural23";
    case Aerosol::rural5: return "rural5";
    case Aerosol::urban5: return "urban5";
    case Aerosol::navy: return "navy";
  }
  return "?";
}

AtmosphereTable AtmosphereTable::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open atmosphere table '" + path + "'");

  AtmosphereTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    std::string alt_s, aerosol_s, t_s;
    if (!(row >> alt_s)) continue;  // blank line
    if (!(row >> aerosol_s >> t_s)) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected 'altitude_km aerosol transmittance'");
    }
    std::string extra;
    if (row >> extra) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": trailing field '" + extra + "'");
    }
    Entry e{};
    try {
      size_t used = 0;
      e.altitude_km = std::stod(alt_s, &used);
      if (used != alt_s.size()) throw std::invalid_argument(alt_s);
      e.transmittance = std::stod(t_s, &used);
      if (used != t_s.size()) throw std::invalid_argument(t_s);
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": malformed number");
    }
    try {
      e.aerosol = aerosol_from_string(aerosol_s);
    } catch (const DataError&) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": unknown aerosol model '" + aerosol_s + "'");
    }
    if (e.transmittance < 0.0 || e.transmittance > 1.0) {
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": transmittance out of [0,1]");
    }
    table.entries_.push_back(e);
  }
  if (table.entries_.empty()) throw DataError("atmosphere table '" + path + "' is empty");
  return table;
}

AtmosphereTable AtmosphereTable::builtin() {
  AtmosphereTable table;
  table.entries_ = {
      {1.0, Aerosol::none, 0.26363},
      {5.0, Aerosol::none, 0.85255},
      {10.0, Aerosol::none, 0.96753},
      {1.0, Aerosol::rural23, 1.6209e-7},
      {10.0, Aerosol::rural23, 0.90658},
      {1.0, Aerosol::rural5, 1.4159e-31},
      {10.0, Aerosol::rural5, 0.90647},
      {1.0, Aerosol::urban5, 3.2276e-38},
      {10.0, Aerosol::urban5, 0.906622},
  };
  return table;
}

double AtmosphereTable::vertical(double altitude_km, Aerosol aerosol) const {
  if (aerosol == Aerosol::navy) {
    throw DataError("aerosol model 'navy' is declared but has no tabulated data");
  }
  for (const auto& e : entries_) {
    if (e.aerosol == aerosol && std::abs(e.altitude_km - altitude_km) < 1e-9) {
      return e.transmittance;
    }
  }
  throw DataError("no atmosphere entry for altitude " + std::to_string(altitude_km) +
                  " km, aerosol '" + aerosol_to_string(aerosol) + "'");
}

double horizontal_transmittance(const AtmosphereTable& table, Aerosol aerosol,
                                double altitude_km, double length_m) {
  if (length_m < 0.0) throw std::invalid_argument("horizontal_transmittance: negative length");
  const double t_ref = table.vertical(altitude_km, aerosol);
  return std::pow(t_ref, length_m / kHorizontalReferenceLengthM);
}

double atmospheric_transmittance(const AtmosphereTable& table, PathKind kind,
                                 Aerosol aerosol, double altitude_km,
                                 double zenith_rad) {
  switch (kind) {
    case PathKind::vertical:
      return table.vertical(altitude_km, aerosol);
    case PathKind::slant: {
      if (zenith_rad < 0.0 || zenith_rad >= 1.5707963267948966) {
        throw std::invalid_argument("slant path requires zenith angle in [0, pi/2)");
      }
      const double t_zenith = table.vertical(10.0, aerosol);
      return std::pow(t_zenith, 1.0 / std::cos(zenith_rad));
    }
    case PathKind::horizontal:
      return table.vertical(altitude_km, aerosol);
  }
  throw std::invalid_argument("bad path kind");
}

}  // namespace qsim
