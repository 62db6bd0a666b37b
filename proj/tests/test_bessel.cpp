#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "qsim/bessel.hpp"
#include "support/oracles.hpp"

using qsim::bessel_i;
using qsim::bessel_i0e;
using qsim::bessel_i0m1;
using qsim::bessel_i1e;

namespace {
// Grid straddling the series/asymptotic switch at x = 15.
constexpr double kGrid[] = {0.0, 0.1, 0.5, 1.0,  2.0,  5.0,
                            10.0, 14.9, 15.1, 20.0, 30.0, 50.0};
}  // namespace

TEST_CASE("scaled I0 matches the integral representation") {
  for (double x : kGrid) {
    const double ref = oracles::bessel_ine(0, x);
    CHECK(bessel_i0e(x) == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("scaled I1 matches the integral representation") {
  for (double x : kGrid) {
    const double ref = oracles::bessel_ine(1, x);
    if (x == 0.0) {
      CHECK(bessel_i1e(x) == 0.0);
      CHECK(std::abs(ref) < 1e-12);
    } else {
      CHECK(bessel_i1e(x) == doctest::Approx(ref).epsilon(1e-9));
    }
  }
}

TEST_CASE("unscaled I0 at x = 1") {
  CHECK(bessel_i(0, 1.0) == doctest::Approx(1.2660658777520082).epsilon(1e-13));
}

TEST_CASE("I0 - 1 avoids cancellation near zero") {
  const double x = 1e-8;
  // Leading terms x^2/4 + x^4/64; the second is far below double precision here.
  CHECK(bessel_i0m1(x) == doctest::Approx(x * x / 4.0).epsilon(1e-12));
  CHECK(bessel_i0m1(x) > 0.0);
  // Direct subtraction would lose every significant digit.
  CHECK(bessel_i(0, x) - 1.0 == doctest::Approx(0.0).epsilon(1.0));
}

TEST_CASE("I0 - 1 agrees with I0 at moderate arguments") {
  for (double x : {0.5, 1.0, 3.0, 10.0}) {
    CHECK(bessel_i0m1(x) == doctest::Approx(bessel_i(0, x) - 1.0).epsilon(1e-12));
  }
}

TEST_CASE("scaled forms are consistent with the unscaled ones") {
  for (double x : {0.5, 2.0, 10.0, 20.0}) {
    CHECK(bessel_i(0, x) == doctest::Approx(bessel_i0e(x) * std::exp(x)).epsilon(1e-12));
    CHECK(bessel_i(1, x) == doctest::Approx(bessel_i1e(x) * std::exp(x)).epsilon(1e-12));
  }
}

TEST_CASE("domain guards") {
  CHECK_THROWS_AS(bessel_i0e(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(bessel_i1e(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(bessel_i0m1(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(bessel_i(2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(bessel_i(-1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(bessel_i(0, -1.0), std::invalid_argument);
}
