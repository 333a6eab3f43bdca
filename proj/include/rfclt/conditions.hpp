#pragma once
// Projective-condition diagnostics: the coefficient functionals b_j and
// c_{u,v}(j), the weighted series sum_j b_j / |j|^{3/2} with tail bounds,
// and the companion series built from single-term projection norms. All
// closed forms condition on the strict past (corner at the origin).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rfclt/models.hpp"

namespace rfclt {

// b_j^2 = sum_{i >= 0} ( sum_{1 <= u <= j} a_{u+i} )^2, evaluated with
// rectangle queries on a prefix array of the coefficients.
struct LinearBEvaluator {
  explicit LinearBEvaluator(const CoeffArray& c);
  double operator()(const Index& j) const;  // b_j, >= 0

  Index support_extent;
  PrefixArray prefix;
};

double linear_b(const CoeffArray& c, const Index& j);

// c_{u,v}(j) = sum_{1 <= k <= j} a_{k+u, k+v}.
double volterra_c(const VolterraCoeffs& c, const Index& u, const Index& v, const Index& j);

// b_j^2 = sum_{u != v, u,v >= 0} ( c_{u,v}(j)^2 + c_{u,v}(j) c_{v,u}(j) ).
// Throws std::runtime_error if the total is negative beyond roundoff.
double volterra_b(const VolterraCoeffs& c, const Index& j);

// sqrt(sigma_sq) * b_u: L2 norm of the window sum projected on the past.
double projective_norm_linear(const CoeffArray& c, const Index& u, double sigma_sq);

enum class Verdict { kFiniteByExactness, kFiniteByBound, kInconclusive };

const char* verdict_name(Verdict v);

struct SeriesTerm {
  Index j;
  double term;
};

struct MWReport {
  std::string series;
  std::vector<SeriesTerm> terms;      // lexicographic over [1, j_max]
  double partial_sum = 0.0;
  std::optional<double> tail_estimate;  // absent when the tail is exactly zero
  Verdict verdict = Verdict::kInconclusive;
};

// How the caller knows the series behaves beyond the evaluated box.
struct TailInfo {
  enum class Kind {
    kNone,            // nothing known: verdict inconclusive
    kZeroBeyond,      // terms vanish outside [1, j_max]: exact total
    kConstantBeyond,  // b is constant in each axis beyond constant_from
  };
  Kind kind = Kind::kNone;
  Index constant_from;

  static TailInfo none() { return TailInfo{}; }
  static TailInfo zero_beyond() { return TailInfo{Kind::kZeroBeyond, Index{}}; }
  static TailInfo constant_beyond(const Index& from) {
    return TailInfo{Kind::kConstantBeyond, from};
  }
};

// Partial sum of sum_{j >= 1} b_j / |j|^{3/2} over [1, j_max], plus a tail
// bound when b is eventually constant: each unbounded axis contributes the
// integral-comparison factor sum_{t > J} t^{-3/2} <= 2/sqrt(J).
MWReport mw_series(const std::function<double(const Index&)>& b, int dim, const Index& j_max,
                   const TailInfo& tail = TailInfo::none());

// Series sum_j ||E(X_j | past)|| / |j|^{1/2} from the closed forms
//   linear:   ||.||^2 = sigma^2 * sum_{i >= j} a_i^2
//   bilinear: ||.||^2 = sigma^4 * sum_{u,v >= j, u != v} (a_{u,v}^2 + a_{u,v} a_{v,u})
// Terms vanish outside the coefficient support, so the total is exact when
// j_max covers the support reach.
MWReport mw_x_series(const Model& m, const Index& j_max);

struct AbsSumRow {
  std::int64_t radius;
  double partial_sum;  // sum of |a_u| over 0 <= u, max_i u_i <= radius
  double increment;    // vs the previous row (first row: vs zero)
};

std::vector<AbsSumRow> abs_sum_scan(const std::function<double(const Index&)>& a, int dim,
                                    const std::vector<std::int64_t>& radii);

}  // namespace rfclt
