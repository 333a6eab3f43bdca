#pragma once
// Martingale approximation along the last lattice axis: block-normalized
// sums, exact removal of the part predictable from the previous block
// boundary (linear models), and the per-block increment sequence D_i whose
// row sums drive the normal approximation. Also the empirical diagnostics
// built on D: square-summability / max-square ratios, sigma_ell^2 estimates
// and their Cauchy increments, and the blocked-vs-raw residual.

#include <cstdint>
#include <vector>

#include "rfclt/field_sim.hpp"
#include "rfclt/lattice.hpp"
#include "rfclt/models.hpp"

namespace rfclt {

// Collapse the last axis into k = floor(n_last / ell) blocks of length ell,
// each scaled by ell^{-1/2}; leftover cells beyond k*ell are dropped. The
// output window keeps the input origin except that block indices restart
// at 1. ell = 1 returns the field unchanged.
Window block_sums(const Window& field, std::int64_t ell);

struct BlockDecomposition {
  std::int64_t ell = 1;
  Window x_blocks;  // ell^{-1/2} * block sums of the field
  Window cond;      // part of x_blocks measurable at the previous block boundary
  Window y_blocks;  // x_blocks - cond; exact martingale differences in the block index
  std::vector<double> d_row;  // D_i = n1^{-1/2} sum_j y_blocks(j, i)
};

// d = 2 linear models. The conditional expectation given everything with
// last-axis coordinate <= (i-1)*ell is the truncated convolution keeping
// exactly those innovations, so the subtraction is analytic, not estimated.
// xi must cover [1 - (support - 1), extent]. Throws for non-2-d input.
BlockDecomposition mds_project_linear(const CoeffArray& c, const InnovationArray& xi,
                                      std::int64_t ell, const Index& extent);

// Convenience: generate innovations for the model (seed overridden by
// rep_seed) and decompose. Linear d = 2 models only.
BlockDecomposition decompose(const Model& m, std::int64_t ell, const Index& extent,
                             std::uint64_t rep_seed);

// D_i over the first n1 rows only (n1 <= first-axis extent of y_blocks).
std::vector<double> column_mds_sums(const BlockDecomposition& dec, std::int64_t n1);

struct McLeishReport {
  double max_over_sqrt_n = 0.0;  // E[max_i D_i^2] / k
  double max_over_kn = 0.0;      // E[max_i D_i^2] / (k * n1)
  double max_se = 0.0;           // standard error of max_over_sqrt_n
  double sum_sq_over_n = 0.0;    // E[(1/k) sum_i D_i^2]
  double sum_sq_se = 0.0;
  double c_sq_hat = 0.0;  // = sum_sq_over_n, the long-run variance estimate
  std::int64_t replications = 0;
};

// Diagnostics for the two martingale-CLT conditions over `reps` independent
// replications on an (n1, k*ell) window.
McLeishReport mcleish_diagnostics(const Model& m, std::int64_t ell, std::int64_t n1,
                                  std::int64_t k, std::int64_t reps, std::uint64_t seed,
                                  int threads = 1);

struct SigmaEllRow {
  std::int64_t n1 = 0;
  double sigma_sq = 0.0;
  double se = 0.0;
};

struct SigmaEllEstimate {
  std::int64_t ell = 1;
  std::vector<SigmaEllRow> rows;
  double sigma_sq = 0.0;  // last grid row
  double se = 0.0;
};

// sigma_ell^2 = E[D_{n1,1}^2] estimated per n1 grid point (grid strictly
// increasing); only the first block is simulated, so the window is (n1, ell).
SigmaEllEstimate sigma_ell_estimate(const Model& m, std::int64_t ell,
                                    const std::vector<std::int64_t>& n1_grid,
                                    std::int64_t reps, std::uint64_t seed,
                                    int threads = 1);

struct CauchyRow {
  std::int64_t ell_from = 0;
  std::int64_t ell_to = 0;
  double sigma_sq_from = 0.0;
  double sigma_sq_to = 0.0;
  double increment = 0.0;  // paired estimate of sigma^2(ell_to) - sigma^2(ell_from)
  double se = 0.0;         // standard error of the paired increment
};

// Successive sigma_ell^2 increments with shared innovations per replication,
// so each increment is a paired difference with its own standard error.
// `ells` must be strictly increasing with at least two entries.
std::vector<CauchyRow> sigma_cauchy_scan(const Model& m, const std::vector<std::int64_t>& ells,
                                         std::int64_t n1, std::int64_t reps,
                                         std::uint64_t seed, int threads = 1);

struct ResidualRow {
  std::int64_t ell = 0;
  double residual = 0.0;  // sqrt(E[(S_n / sqrt(|n|) - k^{-1/2} sum_i D_i)^2])
  double se = 0.0;
};

// How far the blocked martingale sum sits from the raw normalized sum, per
// block length; the raw sum keeps leftover cells that the blocks drop.
std::vector<ResidualRow> residual_scan(const Model& m, const Index& extent,
                                       const std::vector<std::int64_t>& ells,
                                       std::int64_t reps, std::uint64_t seed,
                                       int threads = 1);

}  // namespace rfclt
