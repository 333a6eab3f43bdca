#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "rfclt/rng.hpp"

using namespace rfclt;

TEST_CASE("cell bits are a pure function of seed, stream, and cell") {
  const Index cell{3, -7};
  const CellBits a = cell_bits(42, 1, cell);
  const CellBits b = cell_bits(42, 1, cell);
  CHECK(a.lo == b.lo);
  CHECK(a.hi == b.hi);

  CHECK(cell_bits(43, 1, cell).lo != a.lo);
  CHECK(cell_bits(42, 2, cell).lo != a.lo);
  CHECK(cell_bits(42, 1, Index{3, -6}).lo != a.lo);
  CHECK(cell_bits(42, 1, Index{-7, 3}).lo != a.lo);  // coordinate order matters
}

TEST_CASE("derive_seed separates replication streams") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 1000; ++r) seen.insert(derive_seed(9000, r));
  CHECK(seen.size() == 1000);
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
}

TEST_CASE("u01 lands in (0, 1]") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    const double u = u01(cell_bits(s, 0, Index{0}).lo);
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("normal_from_bits has roughly standard moments") {
  const int n = 20000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = normal_from_bits(cell_bits(123, 5, Index{i, 0}));
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  // 4-sigma bands: sd(mean) ~ 1/sqrt(n), sd(var) ~ sqrt(2/n).
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("philox output changes when any counter word changes") {
  const std::array<std::uint32_t, 4> key_ctr{1, 2, 3, 4};
  const std::array<std::uint32_t, 2> key{9, 11};
  const auto base = philox4x32(key_ctr, key);
  for (int w = 0; w < 4; ++w) {
    auto ctr = key_ctr;
    ctr[static_cast<size_t>(w)] ^= 1u;
    CHECK(philox4x32(ctr, key) != base);
  }
}

TEST_CASE("coordinates beyond the 32-bit bias range are rejected") {
  const std::int64_t big = (std::int64_t(1) << 31);
  CHECK_THROWS_AS(cell_bits(0, 0, Index{big}), std::out_of_range);
  CHECK_NOTHROW(cell_bits(0, 0, Index{big - 1}));
  CHECK_NOTHROW(cell_bits(0, 0, Index{-big}));
}
