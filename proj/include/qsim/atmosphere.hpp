#pragma once

#include <string>
#include <vector>

namespace qsim {

enum class Aerosol { none, rural23, rural5, urban5, navy };

enum class PathKind { vertical, slant, horizontal };

Aerosol aerosol_from_string(const std::string& s);
std::string aerosol_to_string(Aerosol a);

// Zenith-path transmittance table, keyed by ground-station altitude and
// aerosol model. Keys must match exactly (1e-9 tolerance on altitude);
// there is deliberately no interpolation.
class AtmosphereTable {
 public:
  struct Entry {
    double altitude_km;
    Aerosol aerosol;
    double transmittance;
  };

  static AtmosphereTable from_file(const std::string& path);
  static AtmosphereTable builtin();

  double vertical(double altitude_km, Aerosol aerosol) const;

  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

// kind == vertical   : table lookup at altitude_km.
// kind == slant      : vertical(10 km) ^ sec(zenith), zenith in [0, pi/2).
// kind == horizontal : table lookup at altitude_km; the tabulated value is
//                      for a 377 km path, callers rescale by length.
double atmospheric_transmittance(const AtmosphereTable& table, PathKind kind,
                                 Aerosol aerosol, double altitude_km,
                                 double zenith_rad = 0.0);

// Reference path length (m) the horizontal table entries correspond to.
inline constexpr double kHorizontalReferenceLengthM = 377.0e3;

// Beer-Lambert rescaling of the tabulated reference-length transmittance to
// an arbitrary horizontal path length at the same altitude.
double horizontal_transmittance(const AtmosphereTable& table, Aerosol aerosol,
                                double altitude_km, double length_m);

}  // namespace qsim
