#pragma once
// Replicated experiments on simulated fields: the variance-scaling scan
// E(S_n^2)/|n| over an extent grid, the distributional test of S_n/sqrt(|n|)
// against its fitted normal limit, and the exact d = 1 ratio table for the
// projective-series bound on ||S_n||.

#include <cstdint>
#include <vector>

#include "rfclt/field_sim.hpp"
#include "rfclt/lattice.hpp"
#include "rfclt/models.hpp"
#include "rfclt/stats.hpp"

namespace rfclt {

// S_n / sqrt(|n|) for one replication; the model's innovation seed is
// replaced by rep_seed.
double normalized_sum(const Model& m, const Index& extent, std::uint64_t rep_seed);

struct VarianceRow {
  Index extent;
  double mean_s2_over_n = 0.0;  // empirical E(S_n^2) / |n|
  double se = 0.0;
};

struct VarianceScan {
  std::vector<VarianceRow> rows;
  // Convergence diagnostic from the last two rows.
  double last_diff = 0.0;
  double pooled_se = 0.0;
  bool converged = false;  // last_diff <= 3 * pooled_se
};

// Extents must be non-empty, share one dimension, and be sorted by |n|.
VarianceScan variance_scan(const Model& m, const std::vector<Index>& extents,
                           std::int64_t reps, std::uint64_t seed, int threads = 1);

struct CLTReport {
  Index extent;
  std::int64_t replications = 0;
  Summary sample_summary;  // of the standardized sums
  double c_sq_hat = 0.0;   // second moment about zero
  double ks = 0.0;         // KS distance vs N(0, c_sq_hat)
  double threshold = 0.0;
  bool degenerate = false;  // c_sq_hat = 0; no test performed
  bool pass = false;
  bool diagnostic_only = false;  // non-square extent: not a limit-regime run
  std::vector<double> samples;   // standardized sums, replication order
};

// threshold <= 0 selects the default 1% critical value 1.63 / sqrt(reps).
CLTReport clt_experiment(const Model& m, const Index& extent, std::int64_t reps,
                         std::uint64_t seed, double threshold = 0.0, int threads = 1);

struct Pu05Row {
  std::int64_t n = 0;
  double lhs = 0.0;  // ||S_n|| / sqrt(n)
  double rhs = 0.0;  // sum_{k >= 1} k^{-3/2} ||E(S_k | F_1)||, full series
  double implied_constant = 0.0;  // lhs / rhs
  bool degenerate = false;        // rhs = 0
};

// d = 1 finite-support linear model; no Monte Carlo. Both norms come from
// the window-sum coefficients A_k(t) = sum_{i=1..k} a_{i-t}:
//   ||S_k||^2 = sigma^2 sum_t A_k(t)^2,   ||E(S_k|F_1)||^2 over t <= 1 only.
// The conditional norm is constant once k reaches the support length, so the
// series total is the finite head plus a closed-form 3/2-power tail.
std::vector<Pu05Row> pu05_ratio_scan(const CoeffArray& c, double sigma_sq,
                                     const std::vector<std::int64_t>& n_grid);

}  // namespace rfclt
