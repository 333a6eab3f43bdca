#include "rfclt/experiments.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rfclt/parallel.hpp"

namespace rfclt {

double normalized_sum(const Model& m, const Index& extent, std::uint64_t rep_seed) {
  InnovationSpec spec = m.innovations;
  spec.seed = rep_seed;
  const InnovationArray xi = gen_innovations(spec, extent, required_pad(m));
  const Index origin = Index::ones(m.dim());
  const Window f = m.is_linear() ? simulate_linear(m.linear(), xi, extent, origin)
                                 : simulate_volterra(m.volterra(), xi, extent, origin);
  return pairwise_sum(f.values) /
         std::sqrt(static_cast<double>(product_norm(extent)));
}

VarianceScan variance_scan(const Model& m, const std::vector<Index>& extents,
                           std::int64_t reps, std::uint64_t seed, int threads) {
  if (extents.empty()) throw std::invalid_argument("variance_scan: empty extent grid");
  const int d = m.dim();
  std::int64_t prev_norm = 0;
  for (const Index& e : extents) {
    if (e.dim() != d) throw std::invalid_argument("variance_scan: extent dimension mismatch");
    if (!all_ge(e, 1)) throw std::invalid_argument("variance_scan: extents must be >= 1");
    const std::int64_t nn = product_norm(e);
    if (nn < prev_norm) {
      throw std::invalid_argument("variance_scan: extent grid must be sorted by |n|");
    }
    prev_norm = nn;
  }
  if (reps < 2) throw std::invalid_argument("variance_scan: reps >= 2 required");

  VarianceScan scan;
  for (const Index& e : extents) {
    const auto sq = run_replications<double>(
        reps, seed, threads, [&](std::int64_t, std::uint64_t rep_seed) {
          const double t = normalized_sum(m, e, rep_seed);
          return t * t;
        });
    const Summary s = summarize(sq);
    scan.rows.push_back({e, s.mean, s.se});
  }
  if (scan.rows.size() >= 2) {
    const VarianceRow& a = scan.rows[scan.rows.size() - 2];
    const VarianceRow& b = scan.rows.back();
    scan.last_diff = std::abs(b.mean_s2_over_n - a.mean_s2_over_n);
    scan.pooled_se = std::sqrt(a.se * a.se + b.se * b.se);
    scan.converged = scan.last_diff <= 3.0 * scan.pooled_se;
  }
  return scan;
}

CLTReport clt_experiment(const Model& m, const Index& extent, std::int64_t reps,
                         std::uint64_t seed, double threshold, int threads) {
  if (reps < 2) throw std::invalid_argument("clt_experiment: reps >= 2 required");
  if (!all_ge(extent, 1)) throw std::invalid_argument("clt_experiment: extent must be >= 1");

  CLTReport rep;
  rep.extent = extent;
  rep.replications = reps;
  rep.samples = run_replications<double>(
      reps, seed, threads, [&](std::int64_t, std::uint64_t rep_seed) {
        return normalized_sum(m, extent, rep_seed);
      });
  rep.sample_summary = summarize(rep.samples);

  std::vector<double> sq(rep.samples.size());
  for (size_t i = 0; i < sq.size(); ++i) sq[i] = rep.samples[i] * rep.samples[i];
  rep.c_sq_hat = pairwise_sum(sq) / static_cast<double>(sq.size());

  rep.threshold = threshold > 0.0 ? threshold : ks_threshold_1pct(reps);
  for (int i = 0; i < extent.dim(); ++i) {
    if (extent[i] != extent[0]) rep.diagnostic_only = true;
  }
  if (rep.c_sq_hat <= 0.0) {
    rep.degenerate = true;
    return rep;
  }
  rep.ks = ks_statistic(rep.samples, rep.c_sq_hat);
  rep.pass = rep.ks < rep.threshold;
  return rep;
}

namespace {

// A_k(t) = sum_{i=1..k} a_{i-t} for the d = 1 window-sum representation.
double window_coeff(const CoeffArray& c, std::int64_t k, std::int64_t t) {
  double s = 0.0;
  const std::int64_t len = c.support_extent[0];
  for (std::int64_t i = 1; i <= k; ++i) {
    const std::int64_t j = i - t;
    if (j >= 0 && j < len) s += c.at(Index{j});
  }
  return s;
}

double sum_norm(const CoeffArray& c, double sigma_sq, std::int64_t n) {
  const std::int64_t len = c.support_extent[0];
  double s = 0.0;
  for (std::int64_t t = 2 - len; t <= n; ++t) {
    const double a = window_coeff(c, n, t);
    s += a * a;
  }
  return std::sqrt(sigma_sq * s);
}

double cond_norm_f1(const CoeffArray& c, double sigma_sq, std::int64_t k) {
  const std::int64_t len = c.support_extent[0];
  double s = 0.0;
  for (std::int64_t t = 2 - len; t <= 1; ++t) {
    const double a = window_coeff(c, k, t);
    s += a * a;
  }
  return std::sqrt(sigma_sq * s);
}

}  // namespace

std::vector<Pu05Row> pu05_ratio_scan(const CoeffArray& c, double sigma_sq,
                                     const std::vector<std::int64_t>& n_grid) {
  if (c.support_extent.dim() != 1) {
    throw std::invalid_argument("pu05_ratio_scan: d = 1 model required");
  }
  if (sigma_sq < 0.0) throw std::invalid_argument("pu05_ratio_scan: sigma_sq >= 0 required");
  const std::int64_t len = c.support_extent[0];

  // The conditional norm stops depending on k once the window covers the
  // whole support shifted past position 1.
  const std::int64_t k_stable = len;
  std::vector<double> head(static_cast<size_t>(k_stable) + 1, 0.0);
  for (std::int64_t k = 1; k <= k_stable; ++k) {
    head[static_cast<size_t>(k)] = cond_norm_f1(c, sigma_sq, k);
  }
  std::vector<double> head_terms;
  for (std::int64_t k = 1; k <= k_stable; ++k) {
    head_terms.push_back(head[static_cast<size_t>(k)] /
                         (static_cast<double>(k) * std::sqrt(static_cast<double>(k))));
  }
  const double rhs =
      pairwise_sum(head_terms) + head[static_cast<size_t>(k_stable)] * three_halves_tail(k_stable);

  std::vector<Pu05Row> rows;
  for (const std::int64_t n : n_grid) {
    if (n < 1) throw std::invalid_argument("pu05_ratio_scan: n >= 1 required");
    Pu05Row row;
    row.n = n;
    row.lhs = sum_norm(c, sigma_sq, n) / std::sqrt(static_cast<double>(n));
    row.rhs = rhs;
    if (rhs > 0.0) {
      row.implied_constant = row.lhs / rhs;
    } else {
      row.degenerate = true;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rfclt
