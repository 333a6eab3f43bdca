#include "rfclt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rfclt {

double pairwise_sum(const double* x, size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

Summary summarize(const std::vector<double>& x) {
  Summary s;
  s.n = static_cast<std::int64_t>(x.size());
  if (s.n == 0) return s;
  s.mean = pairwise_sum(x) / static_cast<double>(s.n);
  if (s.n < 2) return s;
  std::vector<double> dev2(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - s.mean;
    dev2[i] = d * d;
  }
  s.sd = std::sqrt(pairwise_sum(dev2) / static_cast<double>(s.n - 1));
  s.se = s.sd / std::sqrt(static_cast<double>(s.n));
  return s;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic(std::vector<double> samples, double sigma_sq) {
  if (samples.empty()) {
    throw std::invalid_argument("ks_statistic: empty sample");
  }
  if (!(sigma_sq > 0.0)) {
    throw std::invalid_argument("ks_statistic: sigma_sq must be positive");
  }
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  const double sigma = std::sqrt(sigma_sq);
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double u = normal_cdf(samples[i] / sigma);
    const double hi = (static_cast<double>(i) + 1.0) / n - u;
    const double lo = u - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

double ks_threshold_1pct(std::int64_t r) {
  if (r < 1) {
    throw std::invalid_argument("ks_threshold_1pct: need r >= 1");
  }
  return 1.63 / std::sqrt(static_cast<double>(r));
}

double three_halves_tail(std::int64_t j) {
  if (j < 0) {
    throw std::invalid_argument("three_halves_tail: need j >= 0");
  }
  // Sum small terms directly so the asymptotic part starts at m >= 64; the
  // first omitted Euler-Maclaurin term is then ~1e-17.
  double head = 0.0;
  std::int64_t m = j + 1;
  while (m < 64) {
    head += 1.0 / (static_cast<double>(m) * std::sqrt(static_cast<double>(m)));
    ++m;
  }
  const double x = static_cast<double>(m);
  const double rx = std::sqrt(x);
  // sum_{k >= m} k^{-3/2} = 2/sqrt(m) + m^{-3/2}/2 + m^{-5/2}/8
  //                         - (7/384) m^{-9/2} + (10395/967680) m^{-13/2} - ...
  const double x2 = x * x;
  const double t = 2.0 / rx + 0.5 / (x * rx) + 0.125 / (x2 * rx) -
                   (7.0 / 384.0) / (x2 * x2 * rx) +
                   (10395.0 / 967680.0) / (x2 * x2 * x2 * rx);
  return head + t;
}

}  // namespace rfclt
