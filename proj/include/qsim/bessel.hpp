#pragma once

namespace qsim {

// Modified Bessel functions of the first kind, orders 0 and 1, for x >= 0.
// Power series below x = 15, asymptotic expansion above; relative error is
// below 1e-9 across the switch.

// Exponentially scaled forms exp(-x) * I0(x), exp(-x) * I1(x). These stay
// finite for arbitrarily large x and are what the transmissivity-parameter
// derivation consumes.
double bessel_i0e(double x);
double bessel_i1e(double x);

// I0(x) - 1 without cancellation near x = 0 (power series, first term x^2/4).
double bessel_i0m1(double x);

// Unscaled I_order(x), order 0 or 1. Overflows past x ~ 709.
double bessel_i(int order, double x);

}  // namespace qsim
