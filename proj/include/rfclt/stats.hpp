#pragma once
// Small numeric helpers shared by the experiment drivers. Reductions use a
// fixed-order pairwise tree so results do not depend on thread count or
// accumulation order.

#include <cstdint>
#include <vector>

namespace rfclt {

double pairwise_sum(const double* x, size_t n);
double pairwise_sum(const std::vector<double>& x);

struct Summary {
  std::int64_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1)
  double se = 0.0;  // sd / sqrt(n)
};

Summary summarize(const std::vector<double>& x);

double normal_cdf(double x);  // standard normal

// One-sample Kolmogorov-Smirnov distance between the empirical law of the
// samples and N(0, sigma_sq).
double ks_statistic(std::vector<double> samples, double sigma_sq);

// Asymptotic 1% critical value 1.63 / sqrt(R).
double ks_threshold_1pct(std::int64_t r);

// sum_{k > j} k^{-3/2}, Euler-Maclaurin, absolute error ~ (j+1)^{-13/2}.
double three_halves_tail(std::int64_t j);

}  // namespace rfclt
