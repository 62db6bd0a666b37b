#include "qsim/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qsim/errors.hpp"
#include "qsim/orbit.hpp"
#include "qsim/protocols.hpp"
#include "qsim/rng.hpp"

namespace qsim {

namespace {

constexpr char kCsvHeader[] =
    "t_s,elev_A_deg,range_A_km,elev_B_deg,range_B_km,param,rate_mean,rate_std,qber";

// Stream families keep every command's draws independent; the downlink
// family is shared by the downlink and chain commands so both emit
// identical per-station rows.
constexpr std::uint64_t kFamilyDownlink = 1;
constexpr std::uint64_t kFamilyFiber = 2;
constexpr std::uint64_t kFamilyBbm92 = 3;
constexpr std::uint64_t kFamilyBalloon = 4;
constexpr std::uint64_t kFamilySweep = 5;

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string fmt_note(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::vector<EphemerisSample> load_pass(const Scenario& sc, Command cmd) {
  if (sc.ephemeris_path.empty()) {
    throw ConfigError("command '" + command_to_string(cmd) +
                      "' requires an 'ephemeris' entry in the scenario");
  }
  return load_ephemeris(sc.ephemeris_path, sc.stations);
}

SlantChannel make_slant(const DownlinkCfg& d, const ElevRange& er) {
  SlantChannel ch{};
  ch.aperture_radius_m = d.aperture_radius_m;
  ch.divergence_rad = d.divergence_urad * 1e-6;
  ch.pointing_error_rad = d.pointing_error_urad * 1e-6;
  ch.range_m = er.range_km * 1000.0;
  ch.zenith_rad = (90.0 - er.elevation_deg) * M_PI / 180.0;
  ch.aerosol = d.aerosol;
  return ch;
}

void apply_sifting(const Scenario& sc, LinkRate& lr) {
  if (!sc.sifting) return;
  lr.rate.mean *= 0.5;
  lr.rate.std *= 0.5;
}

void fill_geometry(ResultRow& row, const EphemerisSample& s) {
  row.elev_a_deg = s.stations[0].elevation_deg;
  row.range_a_km = s.stations[0].range_km;
  if (s.stations.size() > 1) {
    row.elev_b_deg = s.stations[1].elevation_deg;
    row.range_b_km = s.stations[1].range_km;
  }
}

struct StationRun {
  std::vector<std::size_t> indices;  // sample indices inside the windows
  std::vector<LinkRate> rates;
  LinkSummary summary;
};

StationRun run_station_downlink(const Scenario& sc, const AtmosphereTable& table,
                                const std::vector<EphemerisSample>& samples,
                                std::size_t station_idx, const DownlinkCfg& dcfg,
                                const RngStream& family) {
  StationRun out{};
  const RngStream st = family.substream(station_idx);
  const auto windows = pass_windows(samples, sc.elevation_mask_deg, {station_idx});
  std::vector<double> key_rates;
  for (const auto& w : windows) {
    for (std::size_t i = w.first; i <= w.last; ++i) {
      LinkRate lr = run_bb84_downlink(
          make_slant(dcfg, samples[i].stations[station_idx]), table, sc.source,
          sc.detector, sc.calibration, sc.photons_per_point, sc.trials,
          st.substream(static_cast<std::uint64_t>(i)));
      apply_sifting(sc, lr);
      out.indices.push_back(i);
      out.rates.push_back(lr);
      key_rates.push_back(lr.rate.mean);
    }
  }

  out.summary.name = sc.stations[station_idx].name;
  if (!out.indices.empty()) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < out.rates.size(); ++k) {
      if (out.rates[k].rate.mean > out.rates[best].rate.mean) best = k;
    }
    out.summary.max_rate = out.rates[best].rate.mean;
    out.summary.t_at_max = samples[out.indices[best]].t_s;
    out.summary.qber_at_max = out.rates[best].qber;
    out.summary.key_bits = key_bits_per_pass(key_rates, sc.photons_per_point);
  }
  return out;
}

// Interleaves per-station runs into rows ordered by time, then station.
void emit_station_rows(RunOutput& out, const std::vector<EphemerisSample>& samples,
                       const std::vector<StationRun>& runs,
                       const std::vector<std::string>& params) {
  std::vector<std::size_t> cursor(runs.size(), 0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t s = 0; s < runs.size(); ++s) {
      if (cursor[s] < runs[s].indices.size() && runs[s].indices[cursor[s]] == i) {
        const LinkRate& lr = runs[s].rates[cursor[s]];
        ResultRow row{};
        row.t_s = samples[i].t_s;
        fill_geometry(row, samples[i]);
        row.param = params[s];
        row.rate_mean = lr.rate.mean;
        row.rate_std = lr.rate.std;
        row.qber = lr.qber;
        out.rows.push_back(std::move(row));
        ++cursor[s];
      }
    }
  }
}

RunOutput cmd_pass(const Scenario& sc, const AtmosphereTable&) {
  RunOutput out{};
  const auto samples = load_pass(sc, Command::pass);
  for (const auto& s : samples) {
    ResultRow row{};
    row.t_s = s.t_s;
    fill_geometry(row, s);
    out.rows.push_back(std::move(row));
  }
  for (std::size_t s = 0; s < sc.stations.size(); ++s) {
    const auto windows = pass_windows(samples, sc.elevation_mask_deg, {s});
    if (windows.empty()) {
      out.summary.notes.push_back("no usable pass for " + sc.stations[s].name + " (mask " +
                                  fmt_note(sc.elevation_mask_deg) + " deg)");
      continue;
    }
    for (const auto& w : windows) {
      out.summary.notes.push_back(
          sc.stations[s].name + " above " + fmt_note(sc.elevation_mask_deg) + " deg from t=" +
          fmt_note(samples[w.first].t_s) + " s to t=" + fmt_note(samples[w.last].t_s) + " s (" +
          std::to_string(w.last - w.first + 1) + " points)");
    }
  }
  return out;
}

RunOutput cmd_downlink(const Scenario& sc, const AtmosphereTable& table) {
  RunOutput out{};
  const auto samples = load_pass(sc, Command::downlink);
  const RngStream family = make_rng(sc.seed, 0).substream(kFamilyDownlink);

  std::vector<StationRun> runs;
  std::vector<std::string> params;
  for (std::size_t s = 0; s < sc.stations.size(); ++s) {
    runs.push_back(run_station_downlink(sc, table, samples, s, sc.downlink, family));
    params.push_back(sc.stations[s].name);
  }
  emit_station_rows(out, samples, runs, params);

  double best_rate = kEmptyField, best_key = kEmptyField;
  for (const auto& r : runs) {
    if (r.indices.empty()) {
      out.summary.notes.push_back("no usable pass for " + r.summary.name + " (mask " +
                                  fmt_note(sc.elevation_mask_deg) + " deg)");
      continue;
    }
    out.summary.links.push_back(r.summary);
    if (std::isnan(best_rate) || r.summary.max_rate > best_rate) best_rate = r.summary.max_rate;
    if (std::isnan(best_key) || r.summary.key_bits > best_key) best_key = r.summary.key_bits;
  }
  out.summary.key_bits = best_key;
  if (!std::isnan(best_rate)) {
    out.summary.throughput_bits_s =
        throughput_bits_s(best_rate, sc.source.f_qubit_hz, sc.p_source_effective);
  }
  return out;
}

RunOutput cmd_chain(const Scenario& sc, const AtmosphereTable& table) {
  if (!sc.chain) throw ConfigError("command 'chain' requires a 'chain' section");
  RunOutput out = cmd_downlink(sc, table);

  // Fiber sublinks, one stream per client index so the layout is stable
  // under chain reordering.
  const RngStream fiber_family = make_rng(sc.seed, 0).substream(kFamilyFiber);
  std::vector<LinkRate> fiber_rates(sc.clients.size());
  std::vector<bool> fiber_done(sc.clients.size(), false);
  const auto fiber_rate_for = [&](const std::string& name) -> const LinkRate& {
    for (std::size_t c = 0; c < sc.clients.size(); ++c) {
      if (sc.clients[c].name != name) continue;
      if (!fiber_done[c]) {
        LinkRate lr = run_bb84_fiber(sc.client_fiber(sc.clients[c]), sc.source, sc.detector,
                                     sc.calibration, sc.photons_per_point, sc.trials,
                                     fiber_family.substream(c));
        apply_sifting(sc, lr);
        fiber_rates[c] = lr;
        fiber_done[c] = true;
      }
      return fiber_rates[c];
    }
    throw ConfigError("chain references unknown client '" + name + "'");
  };
  const auto downlink_summary_for = [&](const std::string& station) -> const LinkSummary* {
    for (const auto& l : out.summary.links) {
      if (l.name == station) return &l;
    }
    return nullptr;
  };

  double chain_min = kEmptyField;
  for (const auto& [lname, rname] : sc.chain->pairs) {
    const ClientCfg* lc = sc.find_client(lname);
    const ClientCfg* rc = sc.find_client(rname);
    const LinkSummary* ldl = downlink_summary_for(lc->station);
    const LinkSummary* rdl = downlink_summary_for(rc->station);
    const std::string pair_name = lname + "-" + rname;
    if (!ldl || !rdl) {
      out.summary.notes.push_back("chain " + pair_name + ": no usable pass for " +
                                  (ldl ? rc->station : lc->station));
      continue;
    }
    const LinkRate& lf = fiber_rate_for(lname);
    const LinkRate& rf = fiber_rate_for(rname);
    const double sublinks[4] = {lf.rate.mean, ldl->max_rate, rdl->max_rate, rf.rate.mean};
    const double qbers[4] = {lf.qber, ldl->qber_at_max, rdl->qber_at_max, rf.qber};
    const double cmin = chain_rate({sublinks[0], sublinks[1], sublinks[2], sublinks[3]});
    std::size_t worst = 0;
    for (std::size_t k = 1; k < 4; ++k) {
      if (sublinks[k] < sublinks[worst]) worst = k;
    }

    LinkSummary ls{};
    ls.name = pair_name;
    ls.max_rate = cmin;
    ls.qber_at_max = qbers[worst];
    out.summary.links.push_back(ls);
    out.summary.notes.push_back("chain " + pair_name + ": min(fiber " + lname + " " +
                                fmt_note(sublinks[0]) + ", sat-" + lc->station + " " +
                                fmt_note(sublinks[1]) + ", sat-" + rc->station + " " +
                                fmt_note(sublinks[2]) + ", fiber " + rname + " " +
                                fmt_note(sublinks[3]) + ") = " + fmt_note(cmin));
    if (std::isnan(chain_min) || cmin < chain_min) chain_min = cmin;
  }
  out.summary.chain_min = chain_min;
  out.summary.throughput_bits_s =
      std::isnan(chain_min)
          ? kEmptyField
          : throughput_bits_s(chain_min, sc.source.f_qubit_hz, sc.p_source_effective);
  return out;
}

RunOutput cmd_bbm92(const Scenario& sc, const AtmosphereTable& table) {
  if (!sc.bbm92) throw ConfigError("command 'bbm92' requires a 'bbm92' section");
  RunOutput out{};
  const auto samples = load_pass(sc, Command::bbm92);

  std::size_t li = 0, ri = 0;
  for (std::size_t s = 0; s < sc.stations.size(); ++s) {
    if (sc.stations[s].name == sc.bbm92->left_station) li = s;
    if (sc.stations[s].name == sc.bbm92->right_station) ri = s;
  }
  const FiberChannel lfib = sc.client_fiber(*sc.find_client(sc.bbm92->left_client));
  const FiberChannel rfib = sc.client_fiber(*sc.find_client(sc.bbm92->right_client));
  const std::string pair_name = sc.bbm92->left_client + "-" + sc.bbm92->right_client;

  const RngStream family = make_rng(sc.seed, 0).substream(kFamilyBbm92);
  const auto windows = pass_windows(samples, sc.elevation_mask_deg, {li, ri});
  if (windows.empty()) {
    out.summary.notes.push_back("no usable joint pass for " + sc.bbm92->left_station + " and " +
                                sc.bbm92->right_station + " (mask " +
                                fmt_note(sc.elevation_mask_deg) + " deg)");
    return out;
  }

  std::vector<double> key_rates;
  double best_rate = -1.0, best_t = 0.0, best_qber = 0.0;
  Bbm92Result best_res{};
  for (const auto& w : windows) {
    for (std::size_t i = w.first; i <= w.last; ++i) {
      Bbm92Result res = run_bbm92(
          make_slant(sc.downlink, samples[i].stations[li]),
          make_slant(sc.downlink, samples[i].stations[ri]), table, lfib, rfib, sc.node,
          sc.detector, sc.detector, sc.calibration, sc.bbm92->pairs_per_point, sc.trials,
          family.substream(static_cast<std::uint64_t>(i)));
      apply_sifting(sc, res.pair);
      ResultRow row{};
      row.t_s = samples[i].t_s;
      fill_geometry(row, samples[i]);
      row.param = pair_name;
      row.rate_mean = res.pair.rate.mean;
      row.rate_std = res.pair.rate.std;
      row.qber = res.pair.qber;
      out.rows.push_back(std::move(row));
      key_rates.push_back(res.pair.rate.mean);
      if (res.pair.rate.mean > best_rate) {
        best_rate = res.pair.rate.mean;
        best_t = samples[i].t_s;
        best_qber = res.pair.qber;
        best_res = res;
      }
    }
  }

  LinkSummary ls{};
  ls.name = pair_name;
  ls.max_rate = best_rate;
  ls.t_at_max = best_t;
  ls.qber_at_max = best_qber;
  ls.key_bits = key_bits_per_pass(key_rates, sc.bbm92->pairs_per_point);
  out.summary.links.push_back(ls);
  out.summary.key_bits = ls.key_bits;
  out.summary.throughput_bits_s =
      throughput_bits_s(best_rate, sc.source.f_epr_hz, sc.p_source_effective);
  out.summary.notes.push_back("arm rates at t=" + fmt_note(best_t) + " s: left " +
                              fmt_note(best_res.arm_left.mean) + ", right " +
                              fmt_note(best_res.arm_right.mean) + ", correlation " +
                              fmt_note(best_res.arm_correlation));
  return out;
}

RunOutput cmd_balloon(const Scenario& sc, const AtmosphereTable& table) {
  if (!sc.balloon) throw ConfigError("command 'balloon' requires a 'balloon' section");
  const BalloonCfg& b = *sc.balloon;

  BalloonChainParams p{};
  p.station_separation_m = b.separation_km * 1000.0;
  p.balloon_alt_km = b.alt_km;
  p.balloon_aperture_m = b.balloon_aperture_m;
  p.station_aperture_m = b.station_aperture_m;
  p.waist_m = b.waist_m;
  p.wavelength_m = b.wavelength_nm * 1e-9;
  p.pointing_error_rad = b.pointing_error_urad * 1e-6;
  p.cn2_horizontal = b.cn2_horizontal;
  p.cn2_vertical = b.cn2_vertical;
  p.aerosol = b.aerosol;
  p.fiber_left = sc.client_fiber(*sc.find_client(b.left_client));
  p.fiber_right = sc.client_fiber(*sc.find_client(b.right_client));

  std::vector<double> cn2_values = {b.cn2_horizontal};
  bool swept = false;
  if (sc.sweep) {
    if (sc.sweep->parameter != "cn2") {
      throw ConfigError("the balloon command sweeps only 'cn2' (got '" + sc.sweep->parameter +
                        "')");
    }
    cn2_values = sc.sweep->values;
    swept = true;
  }

  RunOutput out{};
  const RngStream family = make_rng(sc.seed, 0).substream(kFamilyBalloon);
  for (std::size_t v = 0; v < cn2_values.size(); ++v) {
    BalloonChainParams pv = p;
    pv.cn2_horizontal = cn2_values[v];
    LinkRate lr = run_balloon_chain(pv, table, sc.source, sc.detector, sc.calibration,
                                    sc.photons_per_point, sc.trials,
                                    family.substream(static_cast<std::uint64_t>(v)));
    apply_sifting(sc, lr);
    ResultRow row{};
    row.t_s = 0.0;
    row.param = fmt_g(cn2_values[v]);
    row.rate_mean = lr.rate.mean;
    row.rate_std = lr.rate.std;
    row.qber = lr.qber;
    out.rows.push_back(std::move(row));

    LinkSummary ls{};
    ls.name = "cn2=" + fmt_g(cn2_values[v]);
    ls.max_rate = lr.rate.mean;
    ls.qber_at_max = lr.qber;
    out.summary.links.push_back(ls);
  }
  if (!swept) {
    out.summary.chain_min = out.summary.links.front().max_rate;
    out.summary.throughput_bits_s = throughput_bits_s(
        out.summary.chain_min, sc.source.f_qubit_hz, sc.p_source_effective);
  }
  out.summary.notes.push_back(
      "separation " + fmt_note(b.separation_km) + " km within line-of-sight horizon " +
      fmt_note(horizon_distance_km(b.alt_km, b.alt_km)) + " km");
  return out;
}

RunOutput cmd_sweep(const Scenario& sc, const AtmosphereTable& table) {
  if (!sc.sweep) throw ConfigError("command 'sweep' requires a 'sweep' section");
  if (sc.sweep->parameter == "cn2") {
    throw ConfigError("'cn2' sweeps run under the balloon command");
  }
  RunOutput out{};
  const auto samples = load_pass(sc, Command::sweep);
  const RngStream family = make_rng(sc.seed, 0).substream(kFamilySweep);

  const bool is_aerosol = sc.sweep->parameter == "aerosol";
  const std::size_t n_values =
      is_aerosol ? sc.sweep->labels.size() : sc.sweep->values.size();

  bool any = false;
  for (std::size_t v = 0; v < n_values; ++v) {
    DownlinkCfg d = sc.downlink;
    std::string param_str;
    if (is_aerosol) {
      param_str = sc.sweep->labels[v];
      d.aerosol = aerosol_from_string(param_str);
    } else {
      const double value = sc.sweep->values[v];
      param_str = fmt_g(value);
      if (sc.sweep->parameter == "aperture_radius_m") {
        if (value <= 0.0) throw ConfigError("sweep: aperture_radius_m values must be > 0");
        d.aperture_radius_m = value;
      } else if (sc.sweep->parameter == "divergence_urad") {
        if (value <= 0.0) throw ConfigError("sweep: divergence_urad values must be > 0");
        d.divergence_urad = value;
      } else {
        d.pointing_error_urad = value;
      }
    }

    const StationRun run = run_station_downlink(sc, table, samples, 0, d,
                                                family.substream(static_cast<std::uint64_t>(v)));
    for (std::size_t k = 0; k < run.indices.size(); ++k) {
      const std::size_t i = run.indices[k];
      ResultRow row{};
      row.t_s = samples[i].t_s;
      fill_geometry(row, samples[i]);
      row.param = param_str;
      row.rate_mean = run.rates[k].rate.mean;
      row.rate_std = run.rates[k].rate.std;
      row.qber = run.rates[k].qber;
      out.rows.push_back(std::move(row));
    }
    if (!run.indices.empty()) {
      LinkSummary ls = run.summary;
      ls.name = sc.sweep->parameter + "=" + param_str;
      out.summary.links.push_back(ls);
      any = true;
    }
  }
  if (!any) {
    out.summary.notes.push_back("no usable pass for " + sc.stations.front().name + " (mask " +
                                fmt_note(sc.elevation_mask_deg) + " deg)");
  }
  return out;
}

std::string csv_cell(double v) { return std::isnan(v) ? std::string() : fmt_g(v); }

}  // namespace

Command command_from_string(const std::string& s) {
  if (s == "pass") return Command::pass;
  if (s == "downlink") return Command::downlink;
  if (s == "chain") return Command::chain;
  if (s == "bbm92") return Command::bbm92;
  if (s == "balloon") return Command::balloon;
  if (s == "sweep") return Command::sweep;
  throw ConfigError("unknown command '" + s + "'");
}

std::string command_to_string(Command c) {
  switch (c) {
    case Command::pass: return "pass";
    case Command::downlink: return "downlink";
    case Command::chain: return "chain";
    case Command::bbm92: return "bbm92";
    case Command::balloon: return "balloon";
    case Command::sweep: return "sweep";
  }
  return "?";
}

RunOutput run_scenario(const Scenario& scenario, Command command,
                       const AtmosphereTable& table) {
  switch (command) {
    case Command::pass: return cmd_pass(scenario, table);
    case Command::downlink: return cmd_downlink(scenario, table);
    case Command::chain: return cmd_chain(scenario, table);
    case Command::bbm92: return cmd_bbm92(scenario, table);
    case Command::balloon: return cmd_balloon(scenario, table);
    case Command::sweep: return cmd_sweep(scenario, table);
  }
  throw std::invalid_argument("bad command");
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    if (r.param.find_first_of(",\n#") != std::string::npos) {
      throw std::invalid_argument("write_csv: param '" + r.param + "' contains reserved characters");
    }
    out << csv_cell(r.t_s) << ',' << csv_cell(r.elev_a_deg) << ',' << csv_cell(r.range_a_km)
        << ',' << csv_cell(r.elev_b_deg) << ',' << csv_cell(r.range_b_km) << ',' << r.param
        << ',' << csv_cell(r.rate_mean) << ',' << csv_cell(r.rate_std) << ','
        << csv_cell(r.qber) << '\n';
  }
}

std::vector<ResultRow> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open results file '" + path + "'");

  std::vector<ResultRow> rows;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    if (!have_header) {
      if (line != kCsvHeader) {
        throw DataError(path + ":" + std::to_string(lineno) + ": unexpected header");
      }
      have_header = true;
      continue;
    }

    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    if (fields.size() != 9) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected 9 fields, got " +
                      std::to_string(fields.size()));
    }
    const auto num = [&](std::string s) -> double {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      if (s.empty()) return kEmptyField;
      try {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
      } catch (const std::exception&) {
        throw DataError(path + ":" + std::to_string(lineno) + ": malformed number '" + s + "'");
      }
    };
    ResultRow r{};
    r.t_s = num(fields[0]);
    r.elev_a_deg = num(fields[1]);
    r.range_a_km = num(fields[2]);
    r.elev_b_deg = num(fields[3]);
    r.range_b_km = num(fields[4]);
    r.param = fields[5];
    r.rate_mean = num(fields[6]);
    r.rate_std = num(fields[7]);
    r.qber = num(fields[8]);
    rows.push_back(std::move(r));
  }
  if (!have_header) throw DataError(path + ": missing header");
  return rows;
}

}  // namespace qsim
