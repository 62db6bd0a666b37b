#pragma once

#include <vector>

#include "qsim/channel.hpp"
#include "qsim/rng.hpp"
#include "qsim/stats.hpp"

namespace qsim {

struct SourceParams {
  double f_qubit_hz;  // attenuated-pulse qubit source clock
  double p_qubit;     // probability a clock cycle emits a usable qubit
  double p_flip;      // bit-flip error at the source
  double f_epr_hz;    // entangled-pair source clock
  double p_epr;       // probability a clock cycle emits a pair
};

struct NodeParams {
  double p_bsm;       // Bell-state measurement success probability
  double p_transmit;  // source-to-telescope transmission at the sender
  double t_gate_s;    // gate time of local operations
  double p_coupling;  // telescope-to-fiber coupling at the receiver
};

struct LinkRate {
  RateEstimate rate;  // received (sifted if enabled) qubits per sent qubit
  double qber;        // estimated quantum bit error rate
};

// QBER from independent error mechanisms. Bit-flip, crosstalk and dephasing
// channels compose as 0.5 (1 - prod(1 - 2 p_i)); dephasing contributes
// p_dephase / 2. Dark counts add 0.5 * dark_fraction on top (random bits).
double qber_estimate(double p_flip, double p_crosstalk, double p_dephase,
                     double dark_fraction);

// Satellite-to-ground decoy-free BB84: per-photon transmissivity sampled
// from the wandering-beam distribution, then an atmospheric/calibration
// Bernoulli and a gated detection.
LinkRate run_bb84_downlink(const SlantChannel& ch, const AtmosphereTable& table,
                           const SourceParams& src, const DetectorParams& det,
                           double calibration, int n_photons, int n_trials,
                           const RngStream& base);

// BB84 over fiber between ground nodes.
LinkRate run_bb84_fiber(const FiberChannel& ch, const SourceParams& src,
                        const DetectorParams& det, double calibration,
                        int n_photons, int n_trials, const RngStream& base);

// BB84 over a horizontal free-space path (balloon-to-balloon or
// balloon-to-ground), fixed geometry per call.
LinkRate run_horizontal_link(const HorizontalChannel& ch, const SourceParams& src,
                             const DetectorParams& det, double calibration,
                             int n_photons, int n_trials, const RngStream& base);

struct Bbm92Result {
  LinkRate pair;           // coincidence rate per emitted pair, plus pair QBER
  RateEstimate arm_left;   // single-arm click rates, for diagnostics
  RateEstimate arm_right;
  double arm_correlation;  // sample correlation of per-trial arm rates
  std::vector<double> arm_left_trials;   // per-trial arm rates, trial order
  std::vector<double> arm_right_trials;
};

// Entangled-pair distribution: one satellite source, two independent
// downlink arms, each followed by coupling into a short fiber and a gated
// detector. A pair counts when both arms register a real photon click.
Bbm92Result run_bbm92(const SlantChannel& left, const SlantChannel& right,
                      const AtmosphereTable& table, const FiberChannel& fiber_left,
                      const FiberChannel& fiber_right, const NodeParams& node,
                      const DetectorParams& det_left, const DetectorParams& det_right,
                      double calibration, int n_pairs, int n_trials,
                      const RngStream& base);

// A chained key is limited by its slowest hop.
double chain_rate(const std::vector<double>& sublink_rates);

// Raw generated-key throughput in bits per second.
double throughput_bits_s(double rate_per_qubit, double clock_hz, double p_source);

// Raw key accumulated over one pass: photons_per_point qubits attempted at
// each track point, scaled by the per-photon rate there.
double key_bits_per_pass(const std::vector<double>& rates_per_point,
                         int photons_per_point);

struct BalloonChainParams {
  double station_separation_m;   // ground distance between the end stations
  double balloon_alt_km;
  double balloon_aperture_m;     // receiver aperture on each balloon
  double station_aperture_m;     // receiver aperture at the ground stations
  double waist_m;                // transmitter waist, all free-space hops
  double wavelength_m;
  double pointing_error_rad;
  double cn2_horizontal;         // turbulence at float altitude
  double cn2_vertical;           // effective turbulence for the up/down hops
  Aerosol aerosol;
  FiberChannel fiber_left;       // client fibers at the two ends
  FiberChannel fiber_right;
};

// Two ground clients linked through two tethered balloons: fiber up-couple,
// vertical free-space hop, horizontal balloon-to-balloon hop, vertical hop
// down, fiber. Returns the chain (minimum) rate over the five hops.
LinkRate run_balloon_chain(const BalloonChainParams& p, const AtmosphereTable& table,
                           const SourceParams& src, const DetectorParams& det,
                           double calibration, int n_photons, int n_trials,
                           const RngStream& base);

}  // namespace qsim
