#pragma once

#include "qsim/atmosphere.hpp"
#include "qsim/rng.hpp"

namespace qsim {

// Log-negative Weibull model for the probability distribution of the
// transmission coefficient of a wandering Gaussian beam over a circular
// receiver aperture:  eta(r) = eta0 * exp(-(r / scale)^shape), with the
// beam-centre displacement r Rayleigh-distributed (sigma = wander_sigma_m).
struct PdtcParams {
  double eta0;            // transmissivity for a perfectly centred beam
  double shape;           // Weibull shape (lambda)
  double scale_m;         // Weibull scale (R)
  double wander_sigma_m;  // Rayleigh sigma of the beam-centre displacement
};

struct DetectorParams {
  double p_det;         // detection efficiency given an arriving photon
  double dark_rate_hz;  // dark-count rate
  double gate_s;        // coincidence gate (dark prob = rate * gate)
  double p_crosstalk;   // probability a click lands in the wrong detector
};

// Free-space downlink (or uplink) through the full atmosphere.
struct SlantChannel {
  double aperture_radius_m;
  double divergence_rad;      // far-field half-angle divergence
  double pointing_error_rad;  // pointing jitter (angular sigma)
  double range_m;
  double zenith_rad;
  Aerosol aerosol;
};

// Free-space path at constant altitude through turbulent air.
struct HorizontalChannel {
  double aperture_radius_m;
  double waist_m;             // transmitter beam waist w0
  double wavelength_m;
  double pointing_error_rad;
  double cn2;                 // refractive-index structure constant
  double length_m;
  double t_atm;               // absorptive transmittance of this path
};

struct FiberChannel {
  double length_km;
  double loss_db_per_km;
  double p_coupling;  // free-space-to-fiber (or source-to-fiber) coupling
  double p_dephase;   // phase-flip probability accumulated in the fiber
};

// Far-field spot radius of a diverging beam after range_m.
double beam_spot_slant(double divergence_rad, double range_m);

// Gaussian beam spot radius w(L) = w0 sqrt(1 + (L / z_R)^2).
double beam_spot_horizontal(double waist_m, double wavelength_m, double length_m);

// Beam-centre wander sigma from pointing jitter alone.
double wander_sigma_slant(double pointing_error_rad, double range_m);

// Pointing jitter plus turbulence-induced wander,
// sigma^2 = (theta_p L)^2 + 1.919 Cn^2 L^3 (2 w0)^(-1/3).
double wander_sigma_horizontal(double pointing_error_rad, double cn2,
                               double waist_m, double length_m);

// Fit of the Weibull PDTC to aperture radius a, spot radius w and wander
// sigma. Throws std::invalid_argument when the geometry degenerates.
PdtcParams weibull_pdtc_params(double aperture_radius_m, double spot_radius_m,
                               double wander_sigma_m);

// Draws one transmissivity sample: r Rayleigh, then eta(r).
double sample_transmissivity(const PdtcParams& params, RngStream& rng);

// Exact moments of the PDTC (no sampling); used to cross-check the sampler.
double pdtc_mean(const PdtcParams& params);

double fiber_transmittance(double length_km, double loss_db_per_km);

double dark_count_prob(const DetectorParams& det);

enum class DetectOutcome { no_click, click_correct, click_flipped, dark_click };

// One detection attempt for a photon that arrives with probability
// arrival_prob. Crosstalk flips real clicks; empty slots can dark-click.
DetectOutcome detect(double arrival_prob, const DetectorParams& det, RngStream& rng);

}  // namespace qsim
