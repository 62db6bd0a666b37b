#include "qsim/stats.hpp"

#include <cmath>

namespace qsim {

RateEstimate summarize_rates(const std::vector<double>& rates, std::uint64_t n_sent_per_trial) {
  if (rates.empty()) throw std::invalid_argument("summarize_rates: no trials");
  CompensatedSum s;
  for (double r : rates) s.add(r);
  const int n = static_cast<int>(rates.size());
  const double mean = s.value() / n;
  double sd = 0.0;
  if (n > 1) {
    CompensatedSum sq;
    for (double r : rates) sq.add((r - mean) * (r - mean));
    sd = std::sqrt(sq.value() / (n - 1));
  }
  return RateEstimate{mean, sd, n, n_sent_per_trial};
}

}  // namespace qsim
