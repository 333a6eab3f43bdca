#pragma once
// Brute-force oracle over +-1 innovation configurations. A model on a small
// window is materialized as N base sites (N <= 24); every statistic is then
// an exact average over the 2^N equally likely sign assignments, and
// conditional expectations are exact class averages over configurations that
// agree on the conditioning cone. Nothing here reuses the closed forms from
// conditions.hpp, so the two routes check each other.
//
// With +-1 draws and dyadic coefficients all per-configuration sums are
// dyadic rationals, which keeps the enumeration arithmetic exact. The
// column-MDS structure multiplies values by sqrt(2); that single factor is
// carried separately as `unit` and applied at the boundary.

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "rfclt/models.hpp"

namespace rfclt {

inline constexpr int kOracleMaxSites = 24;   // hard cap on 2^N enumeration
inline constexpr int kOracleDenseSites = 22; // cap for per-config vectors

struct RectSpec {
  Index lo;
  Index hi;  // inclusive, must lie inside the model window
};

struct ExactModel {
  Model model;
  Index window_origin;  // (1,...,1)
  Index window_extent;

  // Base (epsilon) sites in lexicographic order; configuration bit b gives
  // the sign of sites[b].
  std::vector<Index> sites;
  Index base_lo, base_hi;  // materialized base box

  bool mds = false;     // column-MDS innovations
  Index xi_lo, xi_hi;   // region where xi values are defined
  double unit = 1.0;    // xi = unit * integer value
  int degree = 1;       // statistic scales with unit^degree

  int n_sites() const { return static_cast<int>(sites.size()); }
  int site_pos(const Index& cell) const;  // -1 if not materialized
};

// Materialize the base box [origin - pad, origin + extent - 1] (origin is
// (1,...,1)). Innovations must be Rademacher. For iid innovations, sites the
// window never reads are pruned. Throws if pad is too small for the model
// support (naming the missing range) or if more than kOracleMaxSites sites
// remain.
ExactModel enumerate_model(const Model& m, const Index& extent, const Index& pad);

// xi at a cell under a configuration, in integer units (iid: +-1;
// column-MDS: {-1, 0, +1}); multiply by em.unit for the physical value.
int xi_t_value(const ExactModel& em, const Index& cell, std::uint32_t config);

// Rectangle-sum statistic for every configuration, in t-units (multiply by
// unit^degree for physical values). Requires n_sites <= kOracleDenseSites.
std::vector<double> enumerate_statistic(const ExactModel& em, const RectSpec& rect);

// Conditional expectation of per-configuration values given the cone at
// `corner`: classes are configurations with equal innovation values at every
// materialized cell <= corner componentwise. Input and output are indexed by
// configuration (same units as the input).
std::vector<double> condition_values(const ExactModel& em, const std::vector<double>& values,
                                     const Index& corner);

// E(S_rect | cone at `cond`) with S the rectangle sum. The class average is
// computed by streaming all 2^N configurations in Gray-code order. Values
// are in physical units.
struct CondExpectation {
  double l2 = 0.0;          // sqrt(E[E(S|F)^2])
  double grand_mean = 0.0;  // E[E(S|F)] = E S
  std::int64_t classes = 0;

  double value_at(std::uint32_t config) const;

  // Either a dense per-config table or a masked class map (iid fast path).
  std::vector<double> dense;
  std::uint32_t cond_mask = 0;
  std::unordered_map<std::uint32_t, double> class_mean;
};

CondExpectation exact_cond_expectation(const ExactModel& em, const RectSpec& rect,
                                       const Index& cond);

// Max over configurations of |E(E(S|F_hi_corner)|F_lo_corner) - E(S|F_mix)|
// where F_mix has the low corner's first component and the componentwise min
// in the second. d = 2 and hi_corner[0] >= lo_corner[0] required.
double check_commuting(const ExactModel& em, const RectSpec& rect, const Index& hi_corner,
                       const Index& lo_corner);

// ||S_n|| / sqrt(|n|) against the weighted series of exact projection norms
// sum_{j <= j_cap} |j|^{-3/2} ||E(S_j | F_corner)||, corner at (1,...,1)
// and at the origin. Terms whose enumeration would exceed the site cap are
// skipped and counted.
struct VarRatioReport {
  double lhs = 0.0;
  double rhs_f1 = 0.0;
  double rhs_f0 = 0.0;
  double implied_constant = 0.0;  // lhs / rhs_f1
  bool degenerate = false;        // rhs_f1 == 0
  std::int64_t skipped_terms = 0;
};

VarRatioReport exact_var_ratio(const Model& m, const Index& n, const Index& j_cap);

}  // namespace rfclt
