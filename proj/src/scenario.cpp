#include "qsim/scenario.hpp"

#include <fstream>
#include <set>
#include <string>

#include "json.hpp"
#include "qsim/errors.hpp"

namespace qsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("scenario: " + where + ": " + what);
}

void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& required,
                const std::set<std::string>& optional) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!required.count(key) && !optional.count(key)) fail(where, "unknown key '" + key + "'");
  }
  for (const auto& key : required) {
    if (!j.contains(key)) fail(where, "missing key '" + key + "'");
  }
}

double get_num(const json& j, const std::string& where, const std::string& key) {
  if (!j.at(key).is_number()) fail(where, "key '" + key + "' must be a number");
  return j.at(key).get<double>();
}

double get_num_or(const json& j, const std::string& where, const std::string& key,
                  double fallback) {
  return j.contains(key) ? get_num(j, where, key) : fallback;
}

int get_int(const json& j, const std::string& where, const std::string& key) {
  if (!j.at(key).is_number_integer()) fail(where, "key '" + key + "' must be an integer");
  return j.at(key).get<int>();
}

std::uint64_t get_u64(const json& j, const std::string& where, const std::string& key) {
  if (!j.at(key).is_number_unsigned()) {
    fail(where, "key '" + key + "' must be a non-negative integer");
  }
  return j.at(key).get<std::uint64_t>();
}

bool get_bool_or(const json& j, const std::string& where, const std::string& key,
                 bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) fail(where, "key '" + key + "' must be a boolean");
  return j.at(key).get<bool>();
}

std::string get_str(const json& j, const std::string& where, const std::string& key) {
  if (!j.at(key).is_string()) fail(where, "key '" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

Aerosol get_aerosol_or(const json& j, const std::string& where, const std::string& key,
                       Aerosol fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return aerosol_from_string(get_str(j, where, key));
  } catch (const DataError& e) {
    fail(where, e.what());
  }
}

void check_prob(double v, const std::string& where, const std::string& key) {
  if (v < 0.0 || v > 1.0) fail(where, "key '" + key + "' must be in [0, 1]");
}

void check_pos(double v, const std::string& where, const std::string& key) {
  if (!(v > 0.0)) fail(where, "key '" + key + "' must be > 0");
}

void check_nonneg(double v, const std::string& where, const std::string& key) {
  if (v < 0.0) fail(where, "key '" + key + "' must be >= 0");
}

SourceParams parse_source(const json& j) {
  const std::string where = "source";
  check_keys(j, where, {"f_qubit_hz", "p_qubit", "p_flip", "f_epr_hz", "p_epr"}, {});
  SourceParams s{};
  s.f_qubit_hz = get_num(j, where, "f_qubit_hz");
  s.p_qubit = get_num(j, where, "p_qubit");
  s.p_flip = get_num(j, where, "p_flip");
  s.f_epr_hz = get_num(j, where, "f_epr_hz");
  s.p_epr = get_num(j, where, "p_epr");
  check_pos(s.f_qubit_hz, where, "f_qubit_hz");
  check_pos(s.f_epr_hz, where, "f_epr_hz");
  check_prob(s.p_qubit, where, "p_qubit");
  check_prob(s.p_flip, where, "p_flip");
  check_prob(s.p_epr, where, "p_epr");
  return s;
}

DetectorParams parse_detector(const json& j) {
  const std::string where = "detector";
  check_keys(j, where, {"p_det", "dark_rate_hz", "gate_s", "p_crosstalk"}, {});
  DetectorParams d{};
  d.p_det = get_num(j, where, "p_det");
  d.dark_rate_hz = get_num(j, where, "dark_rate_hz");
  d.gate_s = get_num(j, where, "gate_s");
  d.p_crosstalk = get_num(j, where, "p_crosstalk");
  check_prob(d.p_det, where, "p_det");
  check_nonneg(d.dark_rate_hz, where, "dark_rate_hz");
  check_nonneg(d.gate_s, where, "gate_s");
  check_prob(d.p_crosstalk, where, "p_crosstalk");
  return d;
}

NodeParams parse_node(const json& j) {
  const std::string where = "node";
  check_keys(j, where, {}, {"p_bsm", "p_transmit", "t_gate_s", "p_coupling"});
  NodeParams n{0.36, 0.81, 1e-9, 0.81};
  n.p_bsm = get_num_or(j, where, "p_bsm", n.p_bsm);
  n.p_transmit = get_num_or(j, where, "p_transmit", n.p_transmit);
  n.t_gate_s = get_num_or(j, where, "t_gate_s", n.t_gate_s);
  n.p_coupling = get_num_or(j, where, "p_coupling", n.p_coupling);
  check_prob(n.p_bsm, where, "p_bsm");
  check_prob(n.p_transmit, where, "p_transmit");
  check_nonneg(n.t_gate_s, where, "t_gate_s");
  check_prob(n.p_coupling, where, "p_coupling");
  return n;
}

FiberChannel parse_fiber(const json& j) {
  const std::string where = "fiber";
  check_keys(j, where, {}, {"loss_db_per_km", "p_coupling", "p_dephase"});
  FiberChannel f{0.0, 0.18, 0.81, 0.02};
  f.loss_db_per_km = get_num_or(j, where, "loss_db_per_km", f.loss_db_per_km);
  f.p_coupling = get_num_or(j, where, "p_coupling", f.p_coupling);
  f.p_dephase = get_num_or(j, where, "p_dephase", f.p_dephase);
  check_nonneg(f.loss_db_per_km, where, "loss_db_per_km");
  check_prob(f.p_coupling, where, "p_coupling");
  check_prob(f.p_dephase, where, "p_dephase");
  return f;
}

DownlinkCfg parse_downlink(const json& j) {
  const std::string where = "downlink";
  check_keys(j, where, {},
             {"aperture_radius_m", "divergence_urad", "pointing_error_urad", "aerosol"});
  DownlinkCfg d{};
  d.aperture_radius_m = get_num_or(j, where, "aperture_radius_m", d.aperture_radius_m);
  d.divergence_urad = get_num_or(j, where, "divergence_urad", d.divergence_urad);
  d.pointing_error_urad = get_num_or(j, where, "pointing_error_urad", d.pointing_error_urad);
  d.aerosol = get_aerosol_or(j, where, "aerosol", d.aerosol);
  check_pos(d.aperture_radius_m, where, "aperture_radius_m");
  check_pos(d.divergence_urad, where, "divergence_urad");
  check_nonneg(d.pointing_error_urad, where, "pointing_error_urad");
  return d;
}

BalloonCfg parse_balloon(const json& j) {
  const std::string where = "balloon";
  check_keys(j, where,
             {"separation_km", "alt_km", "balloon_aperture_m", "station_aperture_m",
              "waist_m", "cn2_horizontal", "cn2_vertical", "left_client", "right_client"},
             {"wavelength_nm", "pointing_error_urad", "aerosol"});
  BalloonCfg b{};
  b.separation_km = get_num(j, where, "separation_km");
  b.alt_km = get_num(j, where, "alt_km");
  b.balloon_aperture_m = get_num(j, where, "balloon_aperture_m");
  b.station_aperture_m = get_num(j, where, "station_aperture_m");
  b.waist_m = get_num(j, where, "waist_m");
  b.wavelength_nm = get_num_or(j, where, "wavelength_nm", 1550.0);
  b.pointing_error_urad = get_num_or(j, where, "pointing_error_urad", 0.5);
  b.cn2_horizontal = get_num(j, where, "cn2_horizontal");
  b.cn2_vertical = get_num(j, where, "cn2_vertical");
  b.aerosol = get_aerosol_or(j, where, "aerosol", Aerosol::none);
  b.left_client = get_str(j, where, "left_client");
  b.right_client = get_str(j, where, "right_client");
  check_pos(b.separation_km, where, "separation_km");
  check_pos(b.alt_km, where, "alt_km");
  check_pos(b.balloon_aperture_m, where, "balloon_aperture_m");
  check_pos(b.station_aperture_m, where, "station_aperture_m");
  check_pos(b.waist_m, where, "waist_m");
  check_pos(b.wavelength_nm, where, "wavelength_nm");
  check_nonneg(b.pointing_error_urad, where, "pointing_error_urad");
  check_nonneg(b.cn2_horizontal, where, "cn2_horizontal");
  check_nonneg(b.cn2_vertical, where, "cn2_vertical");
  return b;
}

SweepCfg parse_sweep(const json& j) {
  const std::string where = "sweep";
  check_keys(j, where, {"parameter"}, {"values", "labels"});
  SweepCfg s{};
  s.parameter = get_str(j, where, "parameter");
  const std::set<std::string> numeric = {"aperture_radius_m", "divergence_urad",
                                         "pointing_error_urad", "cn2"};
  const bool is_aerosol = s.parameter == "aerosol";
  if (!numeric.count(s.parameter) && !is_aerosol) {
    fail(where, "unsupported parameter '" + s.parameter + "'");
  }
  if (is_aerosol) {
    if (j.contains("values") || !j.contains("labels")) {
      fail(where, "aerosol sweeps take 'labels', not 'values'");
    }
    if (!j.at("labels").is_array() || j.at("labels").empty()) {
      fail(where, "'labels' must be a non-empty array");
    }
    for (const auto& v : j.at("labels")) {
      if (!v.is_string()) fail(where, "'labels' entries must be strings");
      try {
        aerosol_from_string(v.get<std::string>());
      } catch (const DataError& e) {
        fail(where, e.what());
      }
      s.labels.push_back(v.get<std::string>());
    }
  } else {
    if (j.contains("labels") || !j.contains("values")) {
      fail(where, "numeric sweeps take 'values', not 'labels'");
    }
    if (!j.at("values").is_array() || j.at("values").empty()) {
      fail(where, "'values' must be a non-empty array");
    }
    for (const auto& v : j.at("values")) {
      if (!v.is_number()) fail(where, "'values' entries must be numbers");
      const double x = v.get<double>();
      if (x < 0.0) fail(where, "'values' entries must be >= 0");
      s.values.push_back(x);
    }
  }
  return s;
}

Bbm92Cfg parse_bbm92(const json& j) {
  const std::string where = "bbm92";
  check_keys(j, where,
             {"left_station", "right_station", "left_client", "right_client",
              "pairs_per_point"},
             {});
  Bbm92Cfg b{};
  b.left_station = get_str(j, where, "left_station");
  b.right_station = get_str(j, where, "right_station");
  b.left_client = get_str(j, where, "left_client");
  b.right_client = get_str(j, where, "right_client");
  b.pairs_per_point = get_int(j, where, "pairs_per_point");
  if (b.pairs_per_point < 1) fail(where, "pairs_per_point must be >= 1");
  return b;
}

ChainCfg parse_chain(const json& j) {
  const std::string where = "chain";
  check_keys(j, where, {"pairs"}, {});
  if (!j.at("pairs").is_array() || j.at("pairs").empty()) {
    fail(where, "'pairs' must be a non-empty array");
  }
  ChainCfg c{};
  for (const auto& p : j.at("pairs")) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string()) {
      fail(where, "each pair must be [left_client, right_client]");
    }
    c.pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
  }
  return c;
}

std::string dir_of(const std::string& path) {
  const auto slash = path.find_last_of('/');
  if (slash == std::string::npos) return ".";
  if (slash == 0) return "/";
  return path.substr(0, slash);
}

std::string resolve(const std::string& dir, const std::string& path) {
  if (!path.empty() && path.front() == '/') return path;
  return dir + "/" + path;
}

}  // namespace

const GroundStation* Scenario::find_station(const std::string& n) const {
  for (const auto& s : stations) {
    if (s.name == n) return &s;
  }
  return nullptr;
}

const ClientCfg* Scenario::find_client(const std::string& n) const {
  for (const auto& c : clients) {
    if (c.name == n) return &c;
  }
  return nullptr;
}

FiberChannel Scenario::client_fiber(const ClientCfg& c) const {
  FiberChannel f = fiber;
  f.length_km = c.fiber_km;
  return f;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario '" + path + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/false);
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario '" + path + "': " + e.what());
  }

  check_keys(j, "top level",
             {"name", "seed", "trials", "photons_per_point", "stations", "source",
              "detector"},
             {"elevation_mask_deg", "calibration", "sifting", "p_source_effective",
              "ephemeris", "clients", "node", "fiber", "downlink", "balloon", "sweep",
              "bbm92", "chain"});

  Scenario s{};
  s.scenario_dir = dir_of(path);
  s.name = get_str(j, "top level", "name");
  if (s.name.empty()) fail("top level", "'name' must not be empty");
  for (const char ch : s.name) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '-';
    if (!ok) fail("top level", "'name' must be lowercase [a-z0-9-] (used in file names)");
  }
  s.seed = get_u64(j, "top level", "seed");
  s.trials = get_int(j, "top level", "trials");
  s.photons_per_point = get_int(j, "top level", "photons_per_point");
  if (s.trials < 1) fail("top level", "'trials' must be >= 1");
  if (s.photons_per_point < 1) fail("top level", "'photons_per_point' must be >= 1");
  s.elevation_mask_deg = get_num_or(j, "top level", "elevation_mask_deg", 20.0);
  if (s.elevation_mask_deg < 0.0 || s.elevation_mask_deg >= 90.0) {
    fail("top level", "'elevation_mask_deg' must be in [0, 90)");
  }
  s.calibration = get_num_or(j, "top level", "calibration", 1.0);
  check_pos(s.calibration, "top level", "calibration");
  s.sifting = get_bool_or(j, "top level", "sifting", false);
  s.p_source_effective = get_num_or(j, "top level", "p_source_effective", 0.1);
  check_prob(s.p_source_effective, "top level", "p_source_effective");

  if (!j.at("stations").is_array() || j.at("stations").empty()) {
    fail("top level", "'stations' must be a non-empty array");
  }
  for (const auto& js : j.at("stations")) {
    const std::string where = "stations";
    check_keys(js, where, {"name", "lat_deg", "lon_deg"}, {"alt_m"});
    GroundStation g{};
    g.name = get_str(js, where, "name");
    g.lat_deg = get_num(js, where, "lat_deg");
    g.lon_deg = get_num(js, where, "lon_deg");
    g.alt_m = get_num_or(js, where, "alt_m", 0.0);
    if (g.name.empty()) fail(where, "station name must not be empty");
    if (g.lat_deg < -90.0 || g.lat_deg > 90.0) fail(where, "lat_deg out of range");
    if (s.find_station(g.name)) fail(where, "duplicate station '" + g.name + "'");
    s.stations.push_back(std::move(g));
  }

  if (j.contains("clients")) {
    if (!j.at("clients").is_array()) fail("top level", "'clients' must be an array");
    for (const auto& jc : j.at("clients")) {
      const std::string where = "clients";
      check_keys(jc, where, {"name", "station", "fiber_km"}, {});
      ClientCfg c{};
      c.name = get_str(jc, where, "name");
      c.station = get_str(jc, where, "station");
      c.fiber_km = get_num(jc, where, "fiber_km");
      if (c.name.empty()) fail(where, "client name must not be empty");
      check_nonneg(c.fiber_km, where, "fiber_km");
      if (!s.find_station(c.station)) {
        fail(where, "client '" + c.name + "' references unknown station '" + c.station + "'");
      }
      if (s.find_client(c.name)) fail(where, "duplicate client '" + c.name + "'");
      s.clients.push_back(std::move(c));
    }
  }

  s.source = parse_source(j.at("source"));
  s.detector = parse_detector(j.at("detector"));
  if (j.contains("node")) s.node = parse_node(j.at("node"));
  else s.node = NodeParams{0.36, 0.81, 1e-9, 0.81};
  if (j.contains("fiber")) s.fiber = parse_fiber(j.at("fiber"));
  if (j.contains("downlink")) s.downlink = parse_downlink(j.at("downlink"));
  if (j.contains("ephemeris")) {
    s.ephemeris_path = resolve(s.scenario_dir, get_str(j, "top level", "ephemeris"));
  }
  if (j.contains("balloon")) s.balloon = parse_balloon(j.at("balloon"));
  if (j.contains("sweep")) s.sweep = parse_sweep(j.at("sweep"));
  if (j.contains("bbm92")) s.bbm92 = parse_bbm92(j.at("bbm92"));
  if (j.contains("chain")) s.chain = parse_chain(j.at("chain"));

  if (s.balloon) {
    for (const auto& name : {s.balloon->left_client, s.balloon->right_client}) {
      if (!s.find_client(name)) fail("balloon", "unknown client '" + name + "'");
    }
  }
  if (s.bbm92) {
    for (const auto& name : {s.bbm92->left_station, s.bbm92->right_station}) {
      if (!s.find_station(name)) fail("bbm92", "unknown station '" + name + "'");
    }
    const ClientCfg* lc = s.find_client(s.bbm92->left_client);
    const ClientCfg* rc = s.find_client(s.bbm92->right_client);
    if (!lc) fail("bbm92", "unknown client '" + s.bbm92->left_client + "'");
    if (!rc) fail("bbm92", "unknown client '" + s.bbm92->right_client + "'");
    if (lc->station != s.bbm92->left_station) {
      fail("bbm92", "client '" + lc->name + "' is not at station '" + s.bbm92->left_station + "'");
    }
    if (rc->station != s.bbm92->right_station) {
      fail("bbm92", "client '" + rc->name + "' is not at station '" + s.bbm92->right_station + "'");
    }
  }
  if (s.chain) {
    for (const auto& [l, r] : s.chain->pairs) {
      if (!s.find_client(l)) fail("chain", "unknown client '" + l + "'");
      if (!s.find_client(r)) fail("chain", "unknown client '" + r + "'");
      if (l == r) fail("chain", "pair links client '" + l + "' to itself");
    }
  }
  return s;
}

}  // namespace qsim
