#include "qsim/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "qsim/bessel.hpp"

namespace qsim {

namespace {

// Adaptive Simpson on [a, b]; integrands here are smooth and bounded.
double simpson_step(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson_step(a, m, fa, flm, fm);
  const double right = simpson_step(m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(const F& f, double a, double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  return adaptive_simpson(f, a, b, fa, fm, fb, simpson_step(a, b, fa, fm, fb),
                          tol, 48);
}

}  // namespace

double beam_spot_slant(double divergence_rad, double range_m) {
  if (divergence_rad <= 0.0 || range_m <= 0.0) {
    throw std::invalid_argument("beam_spot_slant: divergence and range must be > 0");
  }
  return divergence_rad * range_m;
}

double beam_spot_horizontal(double waist_m, double wavelength_m, double length_m) {
  if (waist_m <= 0.0 || wavelength_m <= 0.0 || length_m < 0.0) {
    throw std::invalid_argument("beam_spot_horizontal: bad geometry");
  }
  const double rayleigh = M_PI * waist_m * waist_m / wavelength_m;
  const double z = length_m / rayleigh;
  return waist_m * std::sqrt(1.0 + z * z);
}

double wander_sigma_slant(double pointing_error_rad, double range_m) {
  if (pointing_error_rad < 0.0 || range_m <= 0.0) {
    throw std::invalid_argument("wander_sigma_slant: bad geometry");
  }
  return pointing_error_rad * range_m;
}

double wander_sigma_horizontal(double pointing_error_rad, double cn2,
                               double waist_m, double length_m) {
  if (pointing_error_rad < 0.0 || cn2 < 0.0 || waist_m <= 0.0 || length_m <= 0.0) {
    throw std::invalid_argument("wander_sigma_horizontal: bad geometry");
  }
  const double jitter = pointing_error_rad * length_m;
  const double turb = 1.919 * cn2 * length_m * length_m * length_m *
                      std::pow(2.0 * waist_m, -1.0 / 3.0);
  return std::sqrt(jitter * jitter + turb);
}

PdtcParams weibull_pdtc_params(double aperture_radius_m, double spot_radius_m,
                               double wander_sigma_m) {
  if (aperture_radius_m <= 0.0 || spot_radius_m <= 0.0 || wander_sigma_m < 0.0) {
    throw std::invalid_argument("weibull_pdtc_params: bad geometry");
  }
  const double a = aperture_radius_m;
  const double x = 4.0 * a * a / (spot_radius_m * spot_radius_m);
  if (x < 1e-12) {
    throw std::invalid_argument("weibull_pdtc_params: aperture negligible vs spot");
  }

  const double eta0 = -std::expm1(-0.5 * x);
  // Q = 1 - exp(-x) I0(x); expand at small x to avoid cancellation.
  double q;
  if (x < 15.0) {
    q = -std::expm1(-x) - std::exp(-x) * bessel_i0m1(x);
  } else {
    q = 1.0 - bessel_i0e(x);
  }
  if (!(q > 0.0)) {
    throw std::invalid_argument("weibull_pdtc_params: degenerate fit (Q <= 0)");
  }
  const double log_ratio = std::log(2.0 * eta0 / q);
  if (!(log_ratio > 0.0)) {
    throw std::invalid_argument("weibull_pdtc_params: degenerate fit (log ratio <= 0)");
  }
  const double shape = (2.0 * x * bessel_i1e(x) / q) / log_ratio;
  const double scale = a * std::pow(log_ratio, -1.0 / shape);

  PdtcParams p{};
  p.eta0 = eta0;
  p.shape = shape;
  p.scale_m = scale;
  p.wander_sigma_m = wander_sigma_m;
  return p;
}

double sample_transmissivity(const PdtcParams& params, RngStream& rng) {
  if (params.wander_sigma_m == 0.0) return params.eta0;
  const double u = rng.uniform();  // (0, 1]
  const double r = params.wander_sigma_m * std::sqrt(-2.0 * std::log(u));
  return params.eta0 * std::exp(-std::pow(r / params.scale_m, params.shape));
}

double pdtc_mean(const PdtcParams& params) {
  if (params.wander_sigma_m == 0.0) return params.eta0;
  const double sigma = params.wander_sigma_m;
  const auto f = [&](double r) {
    const double rayleigh = (r / (sigma * sigma)) * std::exp(-0.5 * r * r / (sigma * sigma));
    return params.eta0 * std::exp(-std::pow(r / params.scale_m, params.shape)) * rayleigh;
  };
  return integrate(f, 0.0, 10.0 * sigma, 1e-12);
}

double fiber_transmittance(double length_km, double loss_db_per_km) {
  if (length_km < 0.0 || loss_db_per_km < 0.0) {
    throw std::invalid_argument("fiber_transmittance: negative length or loss");
  }
  return std::pow(10.0, -loss_db_per_km * length_km / 10.0);
}

double dark_count_prob(const DetectorParams& det) {
  return det.dark_rate_hz * det.gate_s;
}

DetectOutcome detect(double arrival_prob, const DetectorParams& det, RngStream& rng) {
  if (arrival_prob < 0.0 || arrival_prob > 1.0) {
    throw std::invalid_argument("detect: arrival_prob must be in [0, 1]");
  }
  if (det.p_det < 0.0 || det.p_det > 1.0 || det.p_crosstalk < 0.0 ||
      det.p_crosstalk > 1.0) {
    throw std::invalid_argument("detect: detector probabilities must be in [0, 1]");
  }
  if (rng.bernoulli(arrival_prob * det.p_det)) {
    return rng.bernoulli(det.p_crosstalk) ? DetectOutcome::click_flipped
                                          : DetectOutcome::click_correct;
  }
  if (rng.bernoulli(dark_count_prob(det))) return DetectOutcome::dark_click;
  return DetectOutcome::no_click;
}

}  // namespace qsim
