#include "qsim/bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace qsim {

namespace {

constexpr double kSeriesCutoff = 15.0;
constexpr double kTwoPi = 6.283185307179586476925286766559;

// I0(x) = sum_k (x^2/4)^k / (k!)^2; all terms positive, no cancellation.
double i0_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-18) break;
  }
  return sum;
}

// I1(x) = (x/2) * sum_k (x^2/4)^k / (k! (k+1)!)
double i1_series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * (k + 1));
    sum += term;
    if (term < sum * 1e-18) break;
  }
  return 0.5 * x * sum;
}

// Large-x expansion: I_n(x) ~ e^x / sqrt(2 pi x) * sum_k c_k with
// c_k / c_{k-1} = ((2k-1)^2 - 4 n^2) / (8 k x).
double asymptotic_sum(int order, double x) {
  const double n2x4 = 4.0 * order * order;
  double c = 1.0, sum = 1.0;
  for (int k = 1; k <= 24; ++k) {
    const double odd = 2.0 * k - 1.0;
    c *= (odd * odd - n2x4) / (8.0 * k * x);
    sum += c;
    if (std::abs(c) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

double bessel_i0e(double x) {
  if (x < 0.0) throw std::invalid_argument("bessel: x must be >= 0");
  if (x < kSeriesCutoff) return std::exp(-x) * i0_series(x);
  return asymptotic_sum(0, x) / std::sqrt(kTwoPi * x);
}

double bessel_i1e(double x) {
  if (x < 0.0) throw std::invalid_argument("bessel: x must be >= 0");
  if (x < kSeriesCutoff) return std::exp(-x) * i1_series(x);
  return asymptotic_sum(1, x) / std::sqrt(kTwoPi * x);
}

double bessel_i0m1(double x) {
  if (x < 0.0) throw std::invalid_argument("bessel: x must be >= 0");
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 0.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < (sum + 1e-300) * 1e-18) break;
  }
  return sum;
}

double bessel_i(int order, double x) {
  if (order != 0 && order != 1) throw std::invalid_argument("bessel_i: order must be 0 or 1");
  if (x < 0.0) throw std::invalid_argument("bessel: x must be >= 0");
  const double scaled = (order == 0) ? bessel_i0e(x) : bessel_i1e(x);
  return scaled * std::exp(x);
}

}  // namespace qsim
