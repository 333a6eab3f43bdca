#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rfclt/experiments.hpp"

using namespace rfclt;

namespace {

Model iid_normal_2d() {
  Model m;
  m.coeffs = CoeffArray::from_entries(2, {{Index{0, 0}, 1.0}});
  return m;
}

}  // namespace

TEST_CASE("normalized sums are reproducible and respond to the seed") {
  const Model m = iid_normal_2d();
  const double a = normalized_sum(m, Index{8, 8}, 42);
  CHECK(normalized_sum(m, Index{8, 8}, 42) == a);
  CHECK(normalized_sum(m, Index{8, 8}, 43) != a);
}

TEST_CASE("variance scan: white noise rows sit at 1 within 3 standard errors") {
  const VarianceScan scan =
      variance_scan(iid_normal_2d(), {Index{8, 8}, Index{16, 16}, Index{32, 32}},
                    300, 7, 4);
  REQUIRE(scan.rows.size() == 3);
  for (const auto& row : scan.rows) {
    CHECK(std::abs(row.mean_s2_over_n - 1.0) <= 3.0 * row.se);
  }
  CHECK(scan.pooled_se > 0.0);
}

TEST_CASE("variance scan: zero model gives all-zero rows") {
  Model zero;
  zero.coeffs = CoeffArray::from_entries(2, {{Index{0, 0}, 0.0}});
  const VarianceScan scan = variance_scan(zero, {Index{4, 4}, Index{8, 8}}, 50, 0);
  for (const auto& row : scan.rows) {
    CHECK(row.mean_s2_over_n == 0.0);
    CHECK(row.se == 0.0);
  }
  CHECK(scan.converged);
}

TEST_CASE("variance scan rejects an unsorted extent grid") {
  CHECK_THROWS_AS(variance_scan(iid_normal_2d(), {Index{8, 8}, Index{4, 4}}, 10, 0),
                  std::invalid_argument);
}

TEST_CASE("clt experiment: degenerate model flagged, no test claimed") {
  Model zero;
  zero.coeffs = CoeffArray::from_entries(2, {{Index{0, 0}, 0.0}});
  const CLTReport rep = clt_experiment(zero, Index{8, 8}, 100, 3);
  CHECK(rep.degenerate);
  CHECK_FALSE(rep.pass);
  CHECK(rep.c_sq_hat == 0.0);
}

TEST_CASE("clt experiment: white noise passes at desk scale") {
  const CLTReport rep = clt_experiment(iid_normal_2d(), Index{16, 16}, 500, 11, 0.0, 4);
  CHECK(rep.replications == 500);
  CHECK(rep.threshold == doctest::Approx(1.63 / std::sqrt(500.0)).epsilon(1e-12));
  CHECK(std::abs(rep.c_sq_hat - 1.0) < 0.25);
  CHECK(rep.ks >= 0.0);
  CHECK(rep.ks <= 1.0);
  CHECK(rep.pass);
  CHECK_FALSE(rep.diagnostic_only);
  CHECK(rep.samples.size() == 500);
}

TEST_CASE("rectangular extents are labeled diagnostic-only") {
  const CLTReport rep = clt_experiment(iid_normal_2d(), Index{4, 64}, 100, 1);
  CHECK(rep.diagnostic_only);
}

TEST_CASE("pu05 table: pure one-step shift reproduces the zeta-based constant") {
  // a_1 = 1: S_n is a plain innovation sum, lhs = 1 exactly; the series is
  // 1 + sqrt(2) (zeta(3/2) - 1).
  CoeffArray c = CoeffArray::from_entries(1, {{Index{1}, 1.0}});
  const auto rows = pu05_ratio_scan(c, 1.0, {2, 8, 64, 256});
  const double rhs_want = 1.0 + std::sqrt(2.0) * (2.612375348685488 - 1.0);
  for (const auto& row : rows) {
    CHECK_FALSE(row.degenerate);
    CHECK(row.lhs == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(row.rhs == doctest::Approx(rhs_want).epsilon(1e-10));
    CHECK(row.implied_constant == doctest::Approx(1.0 / rhs_want).epsilon(1e-10));
  }
}

TEST_CASE("pu05 table: explicit norms for the half-pair model at n = 2") {
  CoeffArray c = CoeffArray::from_entries(1, {{Index{1}, 0.5}, {Index{2}, 0.5}});
  const auto rows = pu05_ratio_scan(c, 1.0, {2});
  REQUIRE(rows.size() == 1);
  // ||S_2||^2 = 0.25 + 1 + 0.25 = 1.5.
  CHECK(rows[0].lhs == doctest::Approx(std::sqrt(1.5 / 2.0)).epsilon(1e-12));
  // Series: sqrt(.5)/1 + sqrt(1.5)/2^{3/2} + sqrt(2.25)/3^{3/2} + 1.5*tail(3).
  const double zeta32 = 2.612375348685488;
  const double tail3 = zeta32 - 1.0 - std::pow(2.0, -1.5) - std::pow(3.0, -1.5);
  const double want = std::sqrt(0.5) + std::sqrt(1.5) / (2.0 * std::sqrt(2.0)) +
                      1.5 / (3.0 * std::sqrt(3.0)) + 1.5 * tail3;
  CHECK(rows[0].rhs == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("pu05 table: zero model is degenerate, d != 1 rejected") {
  CoeffArray zero = CoeffArray::zeros(Index{3});
  const auto rows = pu05_ratio_scan(zero, 1.0, {2, 4});
  for (const auto& row : rows) {
    CHECK(row.degenerate);
    CHECK(row.implied_constant == 0.0);
  }
  CoeffArray two_d = CoeffArray::zeros(Index{2, 2});
  CHECK_THROWS_AS(pu05_ratio_scan(two_d, 1.0, {2}), std::invalid_argument);
}

TEST_CASE("variance scan and clt agree on the long-run variance") {
  Model m;
  m.coeffs = CoeffArray::from_entries(2, {{Index{0, 0}, 0.5}, {Index{0, 1}, 0.5}});
  const Index extent{32, 32};
  // Independent seeds; both estimate E(S^2)/|n| with the same R, so the
  // difference has standard error ~ sqrt(2) * row.se.
  const VarianceScan scan = variance_scan(m, {Index{16, 16}, extent}, 300, 21, 4);
  const CLTReport rep = clt_experiment(m, extent, 300, 22, 0.0, 4);
  CHECK(std::abs(rep.c_sq_hat - scan.rows.back().mean_s2_over_n) <=
        3.0 * std::sqrt(2.0) * scan.rows.back().se);
}
