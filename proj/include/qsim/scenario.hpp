#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qsim/channel.hpp"
#include "qsim/orbit.hpp"
#include "qsim/protocols.hpp"

namespace qsim {

struct ClientCfg {
  std::string name;
  std::string station;  // must name an entry in Scenario::stations
  double fiber_km;
};

struct DownlinkCfg {
  double aperture_radius_m = 1.0;
  double divergence_urad = 5.0;
  double pointing_error_urad = 0.5;
  Aerosol aerosol = Aerosol::none;
};

struct BalloonCfg {
  double separation_km;
  double alt_km;
  double balloon_aperture_m;
  double station_aperture_m;
  double waist_m;
  double wavelength_nm;
  double pointing_error_urad;
  double cn2_horizontal;
  double cn2_vertical;
  Aerosol aerosol = Aerosol::none;
  std::string left_client;
  std::string right_client;
};

// Swept parameter is one of: aperture_radius_m, divergence_urad,
// pointing_error_urad (downlink sweeps), cn2 (balloon sweeps), aerosol
// (label sweep).
struct SweepCfg {
  std::string parameter;
  std::vector<double> values;        // numeric parameters
  std::vector<std::string> labels;   // aerosol sweeps
};

struct Bbm92Cfg {
  std::string left_station;
  std::string right_station;
  std::string left_client;   // client of left_station whose fiber ends the arm
  std::string right_client;
  int pairs_per_point;
};

struct ChainCfg {
  std::vector<std::pair<std::string, std::string>> pairs;  // client name pairs
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  int trials = 1;
  int photons_per_point = 1;
  double elevation_mask_deg = 20.0;
  double calibration = 1.0;
  bool sifting = false;
  double p_source_effective = 0.1;

  std::string ephemeris_path;  // already resolved against the scenario file dir
  std::vector<GroundStation> stations;
  std::vector<ClientCfg> clients;

  SourceParams source{};
  DetectorParams detector{};
  NodeParams node{};
  FiberChannel fiber{0.0, 0.18, 0.81, 0.02};  // length set per client

  DownlinkCfg downlink{};
  std::optional<BalloonCfg> balloon;
  std::optional<SweepCfg> sweep;
  std::optional<Bbm92Cfg> bbm92;
  std::optional<ChainCfg> chain;

  std::string scenario_dir;

  const GroundStation* find_station(const std::string& name) const;
  const ClientCfg* find_client(const std::string& name) const;
  FiberChannel client_fiber(const ClientCfg& c) const;
};

// Parses and validates a scenario file. Unknown keys, missing keys, wrong
// types and dangling references all raise ConfigError naming the key path.
Scenario load_scenario(const std::string& path);

}  // namespace qsim
