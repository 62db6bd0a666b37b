#include <cmath>
#include <vector>

#include "doctest.h"
#include "qsim/rng.hpp"

using qsim::RngStream;
using qsim::make_rng;

TEST_CASE("same key reproduces the same sequence") {
  RngStream a = make_rng(1234, 7);
  RngStream b = make_rng(1234, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds and streams give different sequences") {
  RngStream a = make_rng(1234, 7);
  RngStream b = make_rng(1235, 7);
  RngStream c = make_rng(1234, 8);
  int diff_ab = 0, diff_ac = 0;
  for (int i = 0; i < 64; ++i) {
    const auto va = a.next_u64();
    if (va != b.next_u64()) ++diff_ab;
    if (va != c.next_u64()) ++diff_ac;
  }
  CHECK(diff_ab > 60);
  CHECK(diff_ac > 60);
}

TEST_CASE("substream derivation ignores how much the parent has drawn") {
  RngStream fresh = make_rng(42, 3);
  RngStream drained = make_rng(42, 3);
  for (int i = 0; i < 137; ++i) drained.next_u64();

  RngStream c1 = fresh.substream(11);
  RngStream c2 = drained.substream(11);
  for (int i = 0; i < 100; ++i) CHECK(c1.next_u64() == c2.next_u64());
}

TEST_CASE("distinct substreams are distinct") {
  RngStream base = make_rng(42, 3);
  RngStream a = base.substream(1);
  RngStream b = base.substream(2);
  int diff = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() != b.next_u64()) ++diff;
  }
  CHECK(diff > 60);
}

TEST_CASE("uniform stays in (0, 1] and has the right mean") {
  RngStream rng = make_rng(2024, 0);
  double sum = 0.0, mn = 1.0, mx = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    sum += u;
    mn = std::min(mn, u);
    mx = std::max(mx, u);
  }
  CHECK(mn > 0.0);
  CHECK(mx <= 1.0);
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.002));
}

TEST_CASE("parallel streams are uncorrelated") {
  RngStream a = make_rng(42, 0);
  RngStream b = make_rng(42, 1);
  const int n = 10000;
  std::vector<double> xs(n), ys(n);
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    xs[i] = a.uniform();
    ys[i] = b.uniform();
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double rho = sxy / std::sqrt(sxx * syy);
  CHECK(std::abs(rho) < 0.05);
}

TEST_CASE("bernoulli matches its probability") {
  RngStream rng = make_rng(7, 0);
  const double p = 0.3;
  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    if (rng.bernoulli(p)) ++hits;
  }
  const double sigma = std::sqrt(p * (1 - p) / n);
  CHECK(std::abs(static_cast<double>(hits) / n - p) < 4.0 * sigma);
}

TEST_CASE("bernoulli degenerate probabilities") {
  RngStream rng = make_rng(7, 1);
  for (int i = 0; i < 100; ++i) {
    CHECK(rng.bernoulli(1.0));
    CHECK_FALSE(rng.bernoulli(0.0));
  }
}
