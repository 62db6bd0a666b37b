// Acceptance gate for the simulator: eleven numbered criteria, one PASS/FAIL
// line each, nonzero exit status when anything fails. Reference values come
// from independent quadrature oracles (tests/support/oracles.hpp) and from
// published measurements of the modelled hardware.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <sstream>
#include <string>
#include <vector>

#include "qsim/atmosphere.hpp"
#include "qsim/channel.hpp"
#include "qsim/orbit.hpp"
#include "qsim/protocols.hpp"
#include "qsim/rng.hpp"
#include "qsim/runner.hpp"
#include "qsim/scenario.hpp"
#include "qsim/svg.hpp"
#include "support/oracles.hpp"

using namespace qsim;

namespace {

int g_failures = 0;

void report(int id, const std::string& desc, bool pass, const std::string& detail) {
  std::printf("%s: C%d %s%s%s\n", pass ? "PASS" : "FAIL", id, desc.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

const DetectorParams kDet{0.95, 100.0, 100e-12, 1e-5};
const SourceParams kSrc{80e6, 0.008, 0.0, 80e6, 0.01};

std::string preset(const char* name) {
  return std::string(QSIM_REPO_ROOT "/presets/") + name;
}

const LinkSummary* find_link(const RunOutput& out, const std::string& name) {
  for (const auto& l : out.summary.links) {
    if (l.name == name) return &l;
  }
  return nullptr;
}

std::string csv_bytes(const RunOutput& out) {
  std::ostringstream s;
  write_csv(s, out.rows);
  return s.str();
}

std::string svg_bytes(const RunOutput& out, PlotKind kind) {
  std::ostringstream s;
  emit_plot(out.rows, kind, "acceptance", s);
  return s.str();
}

// C1: sampled transmissivity mean/variance vs Rayleigh-weighted quadrature,
// 27 geometries, 1e6 samples each, 1e-3 absolute.
void criterion_1() {
  const std::string desc =
      "sampled transmissivity mean/variance match quadrature (27 geometries, 1e-3 abs)";
  double worst = 0.0;
  std::string worst_at;
  RngStream rng = make_rng(1001, 0);
  for (double a : {0.4, 1.0, 1.5}) {
    for (double w : {1.8, 3.0, 6.0}) {
      for (double sigma : {0.15, 0.6, 1.5}) {
        const PdtcParams p = weibull_pdtc_params(a, w, sigma);
        const int n = 1000000;
        double sum = 0.0, sum2 = 0.0;
        for (int i = 0; i < n; ++i) {
          const double eta = sample_transmissivity(p, rng);
          sum += eta;
          sum2 += eta * eta;
        }
        const double mean = sum / n;
        const double var = sum2 / n - mean * mean;
        const double m1 = oracles::pdtc_moment(p.eta0, p.shape, p.scale_m, sigma, 1);
        const double m2 = oracles::pdtc_moment(p.eta0, p.shape, p.scale_m, sigma, 2);
        const double exact_var = m2 - m1 * m1;
        const double err = std::max(std::abs(mean - m1), std::abs(var - exact_var));
        if (err > worst) {
          worst = err;
          worst_at = "a=" + fmt(a) + " w=" + fmt(w) + " sigma=" + fmt(sigma);
        }
      }
    }
  }
  report(1, desc, worst < 1e-3, "max abs error " + fmt(worst) + " at " + worst_at);
}

// C2: the shipped transmittance table reproduces all nine tabulated values
// bit-exactly.
void criterion_2() {
  const std::string desc = "atmosphere table lookups are bit-exact";
  const AtmosphereTable t = AtmosphereTable::from_file(QSIM_REPO_ROOT "/data/atmosphere.txt");
  struct Want {
    double alt;
    Aerosol aerosol;
    double value;
  };
  const Want wants[] = {
      {10.0, Aerosol::none, 0.96753},    {5.0, Aerosol::none, 0.85255},
      {1.0, Aerosol::none, 0.26363},     {1.0, Aerosol::rural23, 1.6209e-7},
      {10.0, Aerosol::rural23, 0.90658}, {1.0, Aerosol::rural5, 1.4159e-31},
      {10.0, Aerosol::rural5, 0.90647},  {1.0, Aerosol::urban5, 3.2276e-38},
      {10.0, Aerosol::urban5, 0.906622},
  };
  int exact = 0;
  for (const auto& w : wants) {
    if (t.vertical(w.alt, w.aerosol) == w.value) ++exact;
  }
  report(2, desc, exact == 9, std::to_string(exact) + "/9 exact");
}

// C3: overhead-pass downlink peaks at 0.238 +/- 20%.
RunOutput g_micius_downlink;  // reused by C10
void criterion_3() {
  const std::string desc = "downlink peak rate 0.238 +/- 20% on the overhead pass";
  const Scenario sc = load_scenario(preset("paris-delft-micius.json"));
  const AtmosphereTable table = AtmosphereTable::from_file(QSIM_REPO_ROOT "/data/atmosphere.txt");
  g_micius_downlink = run_scenario(sc, Command::downlink, table);
  const LinkSummary* paris = find_link(g_micius_downlink, "Paris");
  const bool pass = paris && paris->max_rate > 0.238 * 0.80 && paris->max_rate < 0.238 * 1.20;
  report(3, desc, pass,
         paris ? "peak " + fmt(paris->max_rate) + " at t=" + fmt(paris->t_at_max) + " s"
               : "no Paris link");
}

// C4: client rates relative to the shortest fiber follow the exponential
// fiber loss within 3 MC sigma, and agree with the reference measured key
// rates within 5% (one documented 6.9% outlier at 19 km).
void criterion_4() {
  const std::string desc = "fiber-distance ratios: exponential law and reference rates";
  struct Client {
    const char* name;
    double km;
    double reference_rate;
  };
  const Client clients[] = {{"Alice", 0.001, 0.423}, {"Bob", 3.0, 0.374},
                            {"Charlie", 7.0, 0.322}, {"Dina", 19.0, 0.180},
                            {"Erika", 31.0, 0.115},  {"Fatou", 54.0, 0.043},
                            {"Geralt", 9.0, 0.296},  {"Hadi", 13.0, 0.253}};
  const int n_photons = 100000, n_trials = 10;
  const std::uint64_t n_total = static_cast<std::uint64_t>(n_photons) * n_trials;

  std::vector<double> sim;
  for (std::size_t c = 0; c < 8; ++c) {
    const FiberChannel fib{clients[c].km, 0.18, 0.81, 0.02};
    sim.push_back(run_bb84_fiber(fib, kSrc, kDet, 1.0, n_photons, n_trials,
                                 make_rng(1004, c))
                      .rate.mean);
  }

  bool mc_ok = true;
  double worst_pull = 0.0;
  std::string mc_detail;
  for (std::size_t c = 1; c < 8; ++c) {
    const double ratio = sim[c] / sim[0];
    const double exact =
        std::pow(10.0, -0.18 * (clients[c].km - clients[0].km) / 10.0);
    const double var_c = sim[c] * (1.0 - sim[c]) / static_cast<double>(n_total);
    const double var_0 = sim[0] * (1.0 - sim[0]) / static_cast<double>(n_total);
    const double sigma =
        ratio * std::sqrt(var_c / (sim[c] * sim[c]) + var_0 / (sim[0] * sim[0]));
    const double pull = std::abs(ratio - exact) / sigma;
    worst_pull = std::max(worst_pull, pull);
    if (pull > 3.0) {
      mc_ok = false;
      mc_detail += std::string(" ") + clients[c].name + " pull " + fmt(pull);
    }
  }

  bool table_ok = true;
  std::string table_detail;
  for (std::size_t c = 1; c < 8; ++c) {
    const double table_ratio = clients[c].reference_rate / clients[0].reference_rate;
    const double exact =
        std::pow(10.0, -0.18 * (clients[c].km - clients[0].km) / 10.0);
    const double dev = std::abs(table_ratio - exact) / exact;
    const bool is_dina = std::string(clients[c].name) == "Dina";
    // Dina's published rate sits 6.9% off the exponential law; everything
    // else agrees within 5%.
    const bool ok = is_dina ? (dev > 0.05 && dev < 0.09) : dev < 0.05;
    if (!ok) {
      table_ok = false;
      table_detail += std::string(" ") + clients[c].name + " dev " + fmt(dev);
    }
  }

  report(4, desc, mc_ok && table_ok,
         "worst MC pull " + fmt(worst_pull) + " sigma" + mc_detail + table_detail);
}

// C5: the trusted-chain minimum rule on the reference per-link rates.
void criterion_5() {
  const std::string desc = "trusted-chain minimum rule (0.228 and 0.043, exact)";
  const double bob_hadi = chain_rate({0.374, 0.238, 0.228, 0.253});
  const double erika_fatou = chain_rate({0.115, 0.238, 0.228, 0.043});
  const bool pass = bob_hadi == 0.228 && erika_fatou == 0.043;
  report(5, desc, pass, "Bob-Hadi " + fmt(bob_hadi) + ", Erika-Fatou " + fmt(erika_fatou));
}

// C6: entangled-pair rate at the joint culmination, 0.0183 +/- 25%, and the
// two arms behave independently (coincidence = product of singles).
void criterion_6() {
  const std::string desc = "pair rate 0.0183 +/- 25% and independent arms";
  const Scenario sc = load_scenario(preset("paris-delft-bbm92.json"));
  const AtmosphereTable table = AtmosphereTable::from_file(QSIM_REPO_ROOT "/data/atmosphere.txt");
  const RunOutput out = run_scenario(sc, Command::bbm92, table);
  const LinkSummary* pair = find_link(out, "Bob-Hadi");
  const bool rate_ok =
      pair && pair->max_rate > 0.0183 * 0.75 && pair->max_rate < 0.0183 * 1.25;

  // Independence: at fixed mid-pass geometry, the coincidence probability
  // must equal the product of the single-arm click probabilities.
  const double zenith = (90.0 - 69.40586) * M_PI / 180.0;
  const SlantChannel arm{1.0, 5e-6, 0.5e-6, 584286.3516, zenith, Aerosol::none};
  const FiberChannel fib_l{3.0, 0.18, 0.81, 0.02};
  const FiberChannel fib_r{13.0, 0.18, 0.81, 0.02};
  const NodeParams node{0.36, 0.81, 1e-9, 0.81};
  const int n_pairs = 6000, n_trials = 32;
  const Bbm92Result res = run_bbm92(arm, arm, table, fib_l, fib_r, node, kDet, kDet,
                                    1.15, n_pairs, n_trials, make_rng(1006, 0));
  const double product = res.arm_left.mean * res.arm_right.mean;
  const double sigma_pair = res.pair.rate.std / std::sqrt(static_cast<double>(n_trials));
  const double sigma_prod =
      product * std::sqrt(std::pow(res.arm_left.std / res.arm_left.mean, 2) +
                          std::pow(res.arm_right.std / res.arm_right.mean, 2)) /
      std::sqrt(static_cast<double>(n_trials));
  const double sigma = std::sqrt(sigma_pair * sigma_pair + sigma_prod * sigma_prod);
  const double delta = std::abs(res.pair.rate.mean - product);
  const bool indep_ok = delta < 3.0 * sigma;

  report(6, desc, rate_ok && indep_ok,
         std::string("peak ") + (pair ? fmt(pair->max_rate) : "none") + ", |coinc - L*R| = " +
             fmt(delta) + " vs 3 sigma = " + fmt(3.0 * sigma));
}

// C7: raw key accumulated over a full pass, 17 kbits +/- 30%.
void criterion_7() {
  const std::string desc = "raw key per pass 17 kbits +/- 30%";
  const Scenario sc = load_scenario(preset("key-per-pass.json"));
  const AtmosphereTable table = AtmosphereTable::from_file(QSIM_REPO_ROOT "/data/atmosphere.txt");
  const RunOutput out = run_scenario(sc, Command::downlink, table);
  const double key = out.summary.key_bits;
  const bool pass = key > 17000.0 * 0.70 && key < 17000.0 * 1.30;
  report(7, desc, pass, fmt(key) + " bits");
}

// C8: turbulence sweep of the balloon chain.
RunOutput g_balloon;  // reused by C10
void criterion_8() {
  const std::string desc =
      "balloon sweep: strictly decreasing, >= 3 decades span, calm point near 0.138";
  const Scenario sc = load_scenario(preset("balloon-trusted.json"));
  const AtmosphereTable table = AtmosphereTable::from_file(QSIM_REPO_ROOT "/data/atmosphere.txt");
  g_balloon = run_scenario(sc, Command::balloon, table);
  const auto& links = g_balloon.summary.links;

  bool pass = links.size() == 5;
  std::string detail;
  if (pass) {
    for (std::size_t i = 1; i < links.size(); ++i) {
      if (links[i].max_rate >= links[i - 1].max_rate) pass = false;
    }
    const double span = links.front().max_rate / links.back().max_rate;
    const double calm = links.front().max_rate;
    if (span < 1e3) pass = false;
    if (calm < 0.138 / 2.0 || calm > 0.138 * 2.0) pass = false;
    detail = "calm " + fmt(calm) + ", span " + fmt(span);
  } else {
    detail = "expected 5 sweep points, got " + std::to_string(links.size());
  }

  const double horizon = horizon_distance_km(10.0, 10.0);
  if (horizon < 713.0 || horizon > 715.0) pass = false;
  detail += ", horizon " + fmt(horizon) + " km";
  report(8, desc, pass, detail);
}

// C9: headline throughputs from the chain and pair rates with p_source 0.1.
void criterion_9() {
  const std::string desc = "throughput 1.7 Mbit/s and 150 kbit/s +/- 15%";
  const double chain = throughput_bits_s(0.228, 80e6, 0.1);
  const double pair = throughput_bits_s(0.0183, 80e6, 0.1);
  const bool pass = chain > 1.7e6 * 0.85 && chain < 1.7e6 * 1.15 &&
                    pair > 150e3 * 0.85 && pair < 150e3 * 1.15;
  report(9, desc, pass, fmt(chain) + " bit/s and " + fmt(pair) + " bit/s");
}

// C10: identical seeds give byte-identical CSV and SVG outputs.
void criterion_10() {
  const std::string desc = "reruns are byte-identical (CSV and SVG)";
  if (g_micius_downlink.rows.empty() || g_balloon.rows.empty()) {
    report(10, desc, false, "missing first-run outputs from C3/C8");
    return;
  }
  const AtmosphereTable table = AtmosphereTable::from_file(QSIM_REPO_ROOT "/data/atmosphere.txt");

  const Scenario micius = load_scenario(preset("paris-delft-micius.json"));
  const RunOutput micius2 = run_scenario(micius, Command::downlink, table);
  const bool micius_ok =
      csv_bytes(g_micius_downlink) == csv_bytes(micius2) &&
      svg_bytes(g_micius_downlink, PlotKind::rate_vs_time) ==
          svg_bytes(micius2, PlotKind::rate_vs_time);

  const Scenario balloon = load_scenario(preset("balloon-trusted.json"));
  const RunOutput balloon2 = run_scenario(balloon, Command::balloon, table);
  const bool balloon_ok =
      csv_bytes(g_balloon) == csv_bytes(balloon2) &&
      svg_bytes(g_balloon, PlotKind::rate_vs_param) ==
          svg_bytes(balloon2, PlotKind::rate_vs_param);

  report(10, desc, micius_ok && balloon_ok,
         std::string("downlink ") + (micius_ok ? "stable" : "DRIFTED") + ", balloon " +
             (balloon_ok ? "stable" : "DRIFTED"));
}

// C11: condensed property suite.
void criterion_11() {
  const std::string desc =
      "properties: monotonicity, support bounds, chain permutations, windows, orbit radius";
  std::string detail;
  bool pass = true;
  const auto fail = [&](const std::string& what) {
    pass = false;
    detail += (detail.empty() ? "" : "; ") + what;
  };
  const AtmosphereTable table = AtmosphereTable::builtin();

  {  // Support bounds.
    RngStream rng = make_rng(1011, 0);
    for (double sigma : {0.15, 0.6, 1.5}) {
      const PdtcParams p = weibull_pdtc_params(1.0, 3.0, sigma);
      for (int i = 0; i < 5000; ++i) {
        const double eta = sample_transmissivity(p, rng);
        if (!(eta > 0.0 && eta <= p.eta0)) fail("support bound violated");
      }
    }
  }

  {  // Rate never rises with fiber length (common random numbers).
    double prev = 2.0;
    for (double length : {1.0, 5.0, 15.0, 40.0}) {
      const FiberChannel fib{length, 0.18, 0.81, 0.02};
      const double m =
          run_bb84_fiber(fib, kSrc, kDet, 1.0, 4000, 4, make_rng(1011, 1)).rate.mean;
      if (m > prev) fail("fiber monotonicity violated");
      prev = m;
    }
  }

  {  // Mean transmissivity: down in sigma and spot size, up in aperture.
    PdtcParams p = weibull_pdtc_params(1.0, 2.75, 0.1);
    double prev = pdtc_mean(p);
    for (double sigma : {0.3, 0.6, 1.2}) {
      p.wander_sigma_m = sigma;
      const double m = pdtc_mean(p);
      if (m >= prev) fail("sigma monotonicity violated");
      prev = m;
    }
    prev = 0.0;
    for (double a : {0.4, 0.8, 1.2}) {
      const double m = pdtc_mean(weibull_pdtc_params(a, 2.75, 0.275));
      if (m <= prev) fail("aperture monotonicity violated");
      prev = m;
    }
    prev = 1.0;
    for (double w : {2.0, 3.0, 4.5}) {
      const double m = pdtc_mean(weibull_pdtc_params(1.0, w, 0.275));
      if (m >= prev) fail("spot-size monotonicity violated");
      prev = m;
    }
  }

  {  // Rate never rises with zenith angle (common random numbers).
    double prev = 2.0;
    for (double z_deg : {0.0, 30.0, 60.0}) {
      const SlantChannel ch{1.0, 5e-6, 0.5e-6, 550e3, z_deg * M_PI / 180.0, Aerosol::none};
      const double m =
          run_bb84_downlink(ch, table, kSrc, kDet, 1.0, 4000, 4, make_rng(1011, 2))
              .rate.mean;
      if (m > prev) fail("zenith monotonicity violated");
      prev = m;
    }
  }

  {  // Chain permutation invariance.
    std::vector<double> rates = {0.374, 0.238, 0.228, 0.253};
    const double reference = chain_rate(rates);
    std::sort(rates.begin(), rates.end());
    do {
      if (chain_rate(rates) != reference) fail("chain permutation changed the minimum");
    } while (std::next_permutation(rates.begin(), rates.end()));
  }

  {  // Pass windows partition the visible samples, disjoint and ordered.
    const GroundStation paris{"Paris", 48.8566, 2.3522, 0.0};
    const auto samples = circular_pass(550.0, 90.0, 2.3522, 500.0, 1100.0, {paris}, 10.0);
    const auto windows = pass_windows(samples, 20.0, {0});
    if (windows.empty()) fail("no pass window found");
    std::vector<bool> in_window(samples.size(), false);
    for (std::size_t w = 0; w < windows.size(); ++w) {
      if (windows[w].first > windows[w].last) fail("inverted window");
      if (w > 0 && windows[w - 1].last + 1 >= windows[w].first) fail("windows overlap");
      for (std::size_t i = windows[w].first; i <= windows[w].last; ++i) in_window[i] = true;
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (in_window[i] != (samples[i].stations[0].elevation_deg >= 20.0)) {
        fail("window does not match visibility");
      }
    }
  }

  {  // Circular orbit keeps its radius to < 1e-9 relative.
    const GroundStation stn{"x", 10.0, 20.0, 0.0};
    const auto samples = circular_pass(550.0, 53.0, 100.0, 0.0, 5730.0, {stn}, 30.0);
    const double r_sat = kEarthRadiusKm + 550.0;
    for (const auto& s : samples) {
      const double el = s.stations[0].elevation_deg * M_PI / 180.0;
      const double range = s.stations[0].range_km;
      const double r2 = range * range + kEarthRadiusKm * kEarthRadiusKm +
                        2.0 * range * kEarthRadiusKm * std::sin(el);
      if (std::abs(std::sqrt(r2) - r_sat) / r_sat > 1e-9) fail("radius drifted");
    }
  }

  report(11, desc, pass, pass ? "all properties hold" : detail);
}

void run_guarded(int id, void (*criterion)()) {
  try {
    criterion();
  } catch (const std::exception& e) {
    report(id, "criterion aborted", false, std::string("exception: ") + e.what());
  }
}

}  // namespace

int main() {
  run_guarded(1, criterion_1);
  run_guarded(2, criterion_2);
  run_guarded(3, criterion_3);
  run_guarded(4, criterion_4);
  run_guarded(5, criterion_5);
  run_guarded(6, criterion_6);
  run_guarded(7, criterion_7);
  run_guarded(8, criterion_8);
  run_guarded(9, criterion_9);
  run_guarded(10, criterion_10);
  run_guarded(11, criterion_11);
  if (g_failures) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all 11 criteria passed\n");
  return 0;
}
