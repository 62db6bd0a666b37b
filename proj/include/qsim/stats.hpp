#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qsim/rng.hpp"

namespace qsim {

// Rate estimate over repeated trials: mean and sample standard deviation of the
// per-trial arrival fractions.
struct RateEstimate {
  double mean = 0.0;
  double std = 0.0;
  int n_trials = 0;
  std::uint64_t n_sent_per_trial = 0;
};

struct TrialCounts {
  std::uint64_t arrived = 0;
  std::uint64_t sent = 0;
};

// Compensated (Kahan-Neumaier) accumulator so aggregation order cannot change
// the result across trial orderings.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

RateEstimate summarize_rates(const std::vector<double>& rates, std::uint64_t n_sent_per_trial);

// Runs `experiment` n_trials times, each on its own derived substream, and
// aggregates the per-trial rates. The experiment must return sent > 0.
template <typename F>
RateEstimate run_trials(F&& experiment, int n_trials, const RngStream& base) {
  if (n_trials < 1) throw std::invalid_argument("run_trials: n_trials must be >= 1");
  std::vector<double> rates;
  rates.reserve(static_cast<std::size_t>(n_trials));
  std::uint64_t sent0 = 0;
  for (int t = 0; t < n_trials; ++t) {
    RngStream rng = base.substream(static_cast<std::uint64_t>(t));
    TrialCounts c = experiment(rng);
    if (c.sent == 0) throw std::invalid_argument("run_trials: experiment sent no photons");
    if (t == 0) sent0 = c.sent;
    rates.push_back(static_cast<double>(c.arrived) / static_cast<double>(c.sent));
  }
  return summarize_rates(rates, sent0);
}

}  // namespace qsim
