#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rfclt/models.hpp"

using namespace rfclt;

TEST_CASE("coefficient arrays read zero outside the stored box") {
  CoeffArray c = CoeffArray::from_entries(2, {{Index{0, 0}, 0.5}, {Index{0, 1}, 0.5}});
  CHECK(c.support_extent == Index{1, 2});
  CHECK(c.at(Index{0, 0}) == 0.5);
  CHECK(c.at(Index{0, 1}) == 0.5);
  CHECK(c.at(Index{1, 1}) == 0.0);
  CHECK(c.at(Index{0, 5}) == 0.0);
  CHECK(c.sum_sq() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.sum_abs() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(c.slot(Index{0, 2}), std::out_of_range);
  CHECK_THROWS_AS(CoeffArray::from_entries(2, {{Index{0, -1}, 1.0}}), std::invalid_argument);
}

TEST_CASE("volterra coefficients reject diagonal entries") {
  CHECK_THROWS_AS(VolterraCoeffs::from_entries(1, {{Index{1}, Index{1}, 1.0}}),
                  std::invalid_argument);
  VolterraCoeffs ok = VolterraCoeffs::from_entries(1, {{Index{0}, Index{1}, 1.0}});
  CHECK(ok.lookup(Index{0}, Index{1}) == 1.0);
  CHECK(ok.lookup(Index{1}, Index{0}) == 0.0);
  CHECK(ok.max_index() == Index{1});
}

TEST_CASE("innovation variances") {
  InnovationSpec s;
  s.dist = Distribution::kStandardNormal;
  CHECK(innovation_variance(s) == 1.0);
  s.dist = Distribution::kRademacher;
  CHECK(innovation_variance(s) == 1.0);
  s.dist = Distribution::kCenteredUniform;
  CHECK(innovation_variance(s) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  // The column transform multiplies by sqrt(2) * indicator, which has unit
  // second moment, so the variance is unchanged.
  s.structure = Structure::kColumnMds;
  CHECK(innovation_variance(s) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("alternating family: signs, magnitudes, and the dead zone below 2") {
  CoeffArray c1 = alternating_coeffs(1, 6);
  CHECK(c1.at(Index{0}) == 0.0);
  CHECK(c1.at(Index{1}) == 0.0);
  const double a2 = 1.0 / (std::sqrt(2.0) * std::log(2.0));
  const double a3 = -1.0 / (std::sqrt(3.0) * std::log(3.0));
  CHECK(c1.at(Index{2}) == doctest::Approx(a2).epsilon(1e-15));
  CHECK(c1.at(Index{3}) == doctest::Approx(a3).epsilon(1e-15));
  CHECK(c1.at(Index{4}) > 0.0);
  CHECK(c1.at(Index{5}) < 0.0);

  // d = 2 entries factor into the 1-d values.
  CoeffArray c2 = alternating_coeffs(2, 5);
  CHECK(c2.at(Index{2, 3}) == doctest::Approx(a2 * a3).epsilon(1e-14));
  CHECK(c2.at(Index{3, 3}) == doctest::Approx(a3 * a3).epsilon(1e-14));
  CHECK(c2.at(Index{1, 3}) == 0.0);

  CHECK_THROWS_AS(alternating_coeffs(1, 1), std::invalid_argument);
}

TEST_CASE("model accessors") {
  Model lin;
  lin.coeffs = CoeffArray::from_entries(1, {{Index{1}, 1.0}});
  CHECK(lin.is_linear());
  CHECK(lin.dim() == 1);

  Model vol;
  vol.coeffs = VolterraCoeffs::from_entries(2, {{Index{0, 0}, Index{0, 1}, 1.0}});
  CHECK_FALSE(vol.is_linear());
  CHECK(vol.dim() == 2);
}
