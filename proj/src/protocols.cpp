#include "qsim/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "qsim/errors.hpp"
#include "qsim/orbit.hpp"

namespace qsim {

namespace {

// Shared per-photon loop: channel Bernoulli (probability supplied per photon
// by `arrival`), then a gated detection. Real clicks define the rate; dark
// clicks only feed the measured dark fraction of the QBER.
template <typename ArrivalFn>
LinkRate run_click_protocol(ArrivalFn&& arrival, const DetectorParams& det,
                            double p_flip, double p_dephase, int n_photons,
                            int n_trials, const RngStream& base) {
  if (n_photons < 1) throw std::invalid_argument("n_photons must be >= 1");
  std::uint64_t real_total = 0;
  std::uint64_t dark_total = 0;
  const RateEstimate est = run_trials(
      [&](RngStream& rng) {
        TrialCounts c{};
        c.sent = static_cast<std::uint64_t>(n_photons);
        for (int i = 0; i < n_photons; ++i) {
          const double p = arrival(rng);
          const bool through = rng.bernoulli(p);
          const DetectOutcome out = detect(through ? 1.0 : 0.0, det, rng);
          if (out == DetectOutcome::click_correct || out == DetectOutcome::click_flipped) {
            ++c.arrived;
            ++real_total;
          } else if (out == DetectOutcome::dark_click) {
            ++dark_total;
          }
        }
        return c;
      },
      n_trials, base);

  const std::uint64_t clicks = real_total + dark_total;
  const double dark_fraction =
      clicks == 0 ? 0.0 : static_cast<double>(dark_total) / static_cast<double>(clicks);
  return LinkRate{est, qber_estimate(p_flip, det.p_crosstalk, p_dephase, dark_fraction)};
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  if (n < 2) return 0.0;
  CompensatedSum sa, sb;
  for (std::size_t i = 0; i < n; ++i) { sa.add(a[i]); sb.add(b[i]); }
  const double ma = sa.value() / static_cast<double>(n);
  const double mb = sb.value() / static_cast<double>(n);
  CompensatedSum sab, saa, sbb;
  for (std::size_t i = 0; i < n; ++i) {
    sab.add((a[i] - ma) * (b[i] - mb));
    saa.add((a[i] - ma) * (a[i] - ma));
    sbb.add((b[i] - mb) * (b[i] - mb));
  }
  const double denom = std::sqrt(saa.value() * sbb.value());
  return denom == 0.0 ? 0.0 : sab.value() / denom;
}

}  // namespace

double qber_estimate(double p_flip, double p_crosstalk, double p_dephase,
                     double dark_fraction) {
  if (p_flip < 0.0 || p_flip > 0.5 || p_crosstalk < 0.0 || p_crosstalk > 0.5 ||
      p_dephase < 0.0 || p_dephase > 1.0 || dark_fraction < 0.0 || dark_fraction > 1.0) {
    throw std::invalid_argument("qber_estimate: probabilities out of range");
  }
  const double flips =
      0.5 * (1.0 - (1.0 - 2.0 * p_flip) * (1.0 - 2.0 * p_crosstalk) * (1.0 - p_dephase));
  return flips + 0.5 * dark_fraction;
}

LinkRate run_bb84_downlink(const SlantChannel& ch, const AtmosphereTable& table,
                           const SourceParams& src, const DetectorParams& det,
                           double calibration, int n_photons, int n_trials,
                           const RngStream& base) {
  const double spot = beam_spot_slant(ch.divergence_rad, ch.range_m);
  const double sigma = wander_sigma_slant(ch.pointing_error_rad, ch.range_m);
  const PdtcParams pdtc = weibull_pdtc_params(ch.aperture_radius_m, spot, sigma);
  const double t_atm = atmospheric_transmittance(table, PathKind::slant, ch.aerosol,
                                                 10.0, ch.zenith_rad);
  const double scale = t_atm * calibration;
  return run_click_protocol(
      [&](RngStream& rng) { return sample_transmissivity(pdtc, rng) * scale; }, det,
      src.p_flip, 0.0, n_photons, n_trials, base);
}

LinkRate run_bb84_fiber(const FiberChannel& ch, const SourceParams& src,
                        const DetectorParams& det, double calibration,
                        int n_photons, int n_trials, const RngStream& base) {
  const double p = ch.p_coupling * fiber_transmittance(ch.length_km, ch.loss_db_per_km) *
                   calibration;
  return run_click_protocol([&](RngStream&) { return p; }, det, src.p_flip,
                            ch.p_dephase, n_photons, n_trials, base);
}

LinkRate run_horizontal_link(const HorizontalChannel& ch, const SourceParams& src,
                             const DetectorParams& det, double calibration,
                             int n_photons, int n_trials, const RngStream& base) {
  const double spot = beam_spot_horizontal(ch.waist_m, ch.wavelength_m, ch.length_m);
  const double sigma = wander_sigma_horizontal(ch.pointing_error_rad, ch.cn2,
                                               ch.waist_m, ch.length_m);
  const PdtcParams pdtc = weibull_pdtc_params(ch.aperture_radius_m, spot, sigma);
  const double scale = ch.t_atm * calibration;
  return run_click_protocol(
      [&](RngStream& rng) { return sample_transmissivity(pdtc, rng) * scale; }, det,
      src.p_flip, 0.0, n_photons, n_trials, base);
}

Bbm92Result run_bbm92(const SlantChannel& left, const SlantChannel& right,
                      const AtmosphereTable& table, const FiberChannel& fiber_left,
                      const FiberChannel& fiber_right, const NodeParams& node,
                      const DetectorParams& det_left, const DetectorParams& det_right,
                      double calibration, int n_pairs, int n_trials,
                      const RngStream& base) {
  if (n_pairs < 1) throw std::invalid_argument("run_bbm92: n_pairs must be >= 1");
  if (n_trials < 1) throw std::invalid_argument("run_bbm92: n_trials must be >= 1");

  struct Arm {
    PdtcParams pdtc;
    double scale;  // everything between the sampled transmissivity and the detector
  };
  const auto make_arm = [&](const SlantChannel& ch, const FiberChannel& fib) {
    Arm arm{};
    const double spot = beam_spot_slant(ch.divergence_rad, ch.range_m);
    const double sigma = wander_sigma_slant(ch.pointing_error_rad, ch.range_m);
    arm.pdtc = weibull_pdtc_params(ch.aperture_radius_m, spot, sigma);
    const double t_atm = atmospheric_transmittance(table, PathKind::slant, ch.aerosol,
                                                   10.0, ch.zenith_rad);
    // The pair source couples into the telescope with p_transmit; the client
    // fiber then only attenuates (its coupling is part of p_transmit here).
    arm.scale = t_atm * calibration * node.p_transmit *
                fiber_transmittance(fib.length_km, fib.loss_db_per_km);
    return arm;
  };
  const Arm arm_l = make_arm(left, fiber_left);
  const Arm arm_r = make_arm(right, fiber_right);

  std::vector<double> pair_rates, left_rates, right_rates;
  pair_rates.reserve(static_cast<std::size_t>(n_trials));
  left_rates.reserve(static_cast<std::size_t>(n_trials));
  right_rates.reserve(static_cast<std::size_t>(n_trials));
  std::uint64_t coinc_real = 0;
  std::uint64_t coinc_any = 0;

  for (int t = 0; t < n_trials; ++t) {
    RngStream rng = base.substream(static_cast<std::uint64_t>(t));
    std::uint64_t pairs = 0, clicks_l = 0, clicks_r = 0;
    for (int i = 0; i < n_pairs; ++i) {
      const double eta_l = sample_transmissivity(arm_l.pdtc, rng);
      const double eta_r = sample_transmissivity(arm_r.pdtc, rng);
      const bool through_l = rng.bernoulli(eta_l * arm_l.scale);
      const bool through_r = rng.bernoulli(eta_r * arm_r.scale);
      const DetectOutcome out_l = detect(through_l ? 1.0 : 0.0, det_left, rng);
      const DetectOutcome out_r = detect(through_r ? 1.0 : 0.0, det_right, rng);
      const bool real_l = out_l == DetectOutcome::click_correct ||
                          out_l == DetectOutcome::click_flipped;
      const bool real_r = out_r == DetectOutcome::click_correct ||
                          out_r == DetectOutcome::click_flipped;
      const bool any_l = real_l || out_l == DetectOutcome::dark_click;
      const bool any_r = real_r || out_r == DetectOutcome::dark_click;
      if (real_l) ++clicks_l;
      if (real_r) ++clicks_r;
      if (real_l && real_r) { ++pairs; ++coinc_real; }
      if (any_l && any_r) ++coinc_any;
    }
    const double denom = static_cast<double>(n_pairs);
    pair_rates.push_back(static_cast<double>(pairs) / denom);
    left_rates.push_back(static_cast<double>(clicks_l) / denom);
    right_rates.push_back(static_cast<double>(clicks_r) / denom);
  }

  const double dark_fraction =
      coinc_any == 0
          ? 0.0
          : static_cast<double>(coinc_any - coinc_real) / static_cast<double>(coinc_any);
  // Both arms' flip mechanisms act on the shared pair state.
  const double flips = 0.5 * (1.0 - (1.0 - 2.0 * det_left.p_crosstalk) *
                                        (1.0 - 2.0 * det_right.p_crosstalk) *
                                        (1.0 - fiber_left.p_dephase) *
                                        (1.0 - fiber_right.p_dephase));

  Bbm92Result res{};
  res.pair.rate = summarize_rates(pair_rates, static_cast<std::uint64_t>(n_pairs));
  res.pair.qber = flips + 0.5 * dark_fraction;
  res.arm_left = summarize_rates(left_rates, static_cast<std::uint64_t>(n_pairs));
  res.arm_right = summarize_rates(right_rates, static_cast<std::uint64_t>(n_pairs));
  res.arm_correlation = pearson(left_rates, right_rates);
  res.arm_left_trials = std::move(left_rates);
  res.arm_right_trials = std::move(right_rates);
  return res;
}

double chain_rate(const std::vector<double>& sublink_rates) {
  if (sublink_rates.empty()) throw std::invalid_argument("chain_rate: no sublinks");
  double best = sublink_rates.front();
  for (const double r : sublink_rates) {
    if (r < 0.0) throw std::invalid_argument("chain_rate: negative rate");
    best = std::min(best, r);
  }
  return best;
}

double throughput_bits_s(double rate_per_qubit, double clock_hz, double p_source) {
  if (rate_per_qubit < 0.0 || clock_hz < 0.0 || p_source < 0.0 || p_source > 1.0) {
    throw std::invalid_argument("throughput_bits_s: bad arguments");
  }
  return rate_per_qubit * clock_hz * p_source;
}

double key_bits_per_pass(const std::vector<double>& rates_per_point,
                         int photons_per_point) {
  if (photons_per_point < 1) {
    throw std::invalid_argument("key_bits_per_pass: photons_per_point must be >= 1");
  }
  CompensatedSum sum;
  for (const double r : rates_per_point) {
    if (r < 0.0) throw std::invalid_argument("key_bits_per_pass: negative rate");
    sum.add(static_cast<double>(photons_per_point) * r);
  }
  return sum.value();
}

LinkRate run_balloon_chain(const BalloonChainParams& p, const AtmosphereTable& table,
                           const SourceParams& src, const DetectorParams& det,
                           double calibration, int n_photons, int n_trials,
                           const RngStream& base) {
  const double horizon_km = horizon_distance_km(p.balloon_alt_km, p.balloon_alt_km);
  if (p.station_separation_m / 1000.0 > horizon_km) {
    throw ConfigError("balloon separation " + std::to_string(p.station_separation_m / 1000.0) +
                      " km exceeds line-of-sight horizon " + std::to_string(horizon_km) + " km");
  }

  const double t_vert = table.vertical(p.balloon_alt_km, p.aerosol);
  const double alt_m = p.balloon_alt_km * 1000.0;

  HorizontalChannel up{};
  up.aperture_radius_m = p.balloon_aperture_m;
  up.waist_m = p.waist_m;
  up.wavelength_m = p.wavelength_m;
  up.pointing_error_rad = p.pointing_error_rad;
  up.cn2 = p.cn2_vertical;
  up.length_m = alt_m;
  up.t_atm = t_vert;

  HorizontalChannel across = up;
  across.cn2 = p.cn2_horizontal;
  across.length_m = p.station_separation_m;
  across.t_atm = horizontal_transmittance(table, p.aerosol, p.balloon_alt_km,
                                          p.station_separation_m);

  HorizontalChannel down = up;
  down.aperture_radius_m = p.station_aperture_m;

  // Five hops, each a trusted relay: client fiber, up, across, down, fiber.
  const LinkRate hops[5] = {
      run_bb84_fiber(p.fiber_left, src, det, calibration, n_photons, n_trials,
                     base.substream(0)),
      run_horizontal_link(up, src, det, calibration, n_photons, n_trials,
                          base.substream(1)),
      run_horizontal_link(across, src, det, calibration, n_photons, n_trials,
                          base.substream(2)),
      run_horizontal_link(down, src, det, calibration, n_photons, n_trials,
                          base.substream(3)),
      run_bb84_fiber(p.fiber_right, src, det, calibration, n_photons, n_trials,
                     base.substream(4)),
  };

  std::size_t worst = 0;
  for (std::size_t i = 1; i < 5; ++i) {
    if (hops[i].rate.mean < hops[worst].rate.mean) worst = i;
  }
  return hops[worst];
}

}  // namespace qsim
