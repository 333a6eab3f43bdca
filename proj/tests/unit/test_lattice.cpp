#include <doctest.h>

#include <random>
#include <stdexcept>
#include <vector>

#include "rfclt/lattice.hpp"

using namespace rfclt;

TEST_CASE("index arithmetic and comparisons") {
  Index a{3, -1};
  Index b{1, 5};
  CHECK((a + b) == Index{4, 4});
  CHECK((a - b) == Index{2, -6});
  CHECK(cwise_min(a, b) == Index{1, -1});
  CHECK(cwise_max(a, b) == Index{3, 5});
  CHECK(all_le(Index{1, 2}, Index{1, 3}));
  CHECK_FALSE(all_le(Index{2, 2}, Index{1, 3}));
  CHECK(all_ge(Index{2, 2}, 1));
  CHECK(product_norm(Index{3, 4, 5}) == 60);
  CHECK(Index::ones(3) == Index{1, 1, 1});
  CHECK(Index{2, -7}.str() == "(2,-7)");
}

TEST_CASE("index dimension mismatch throws") {
  CHECK_THROWS_AS((Index{1, 2} + Index{1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(product_norm(Index{}), std::invalid_argument);
}

TEST_CASE("for_each_index walks lexicographically, last axis fastest") {
  std::vector<Index> seen;
  for_each_index(Index{0, 0}, Index{1, 1}, [&](const Index& i) { seen.push_back(i); });
  REQUIRE(seen.size() == 4);
  CHECK(seen[0] == Index{0, 0});
  CHECK(seen[1] == Index{0, 1});
  CHECK(seen[2] == Index{1, 0});
  CHECK(seen[3] == Index{1, 1});

  int count = 0;
  for_each_index(Index{2}, Index{1}, [&](const Index&) { ++count; });
  CHECK(count == 0);  // empty box
}

TEST_CASE("window storage is row-major with the last axis contiguous") {
  Window w(Index{1, 1}, Index{2, 3});
  REQUIRE(w.values.size() == 6);
  for (size_t i = 0; i < 6; ++i) w.values[i] = static_cast<double>(i);
  CHECK(w.at(Index{1, 1}) == 0.0);
  CHECK(w.at(Index{1, 2}) == 1.0);
  CHECK(w.at(Index{2, 1}) == 3.0);
  CHECK(w.hi() == Index{2, 3});
  CHECK(w.contains(Index{2, 3}));
  CHECK_FALSE(w.contains(Index{0, 1}));
  CHECK_THROWS_AS(w.at(Index{3, 1}), std::out_of_range);
}

TEST_CASE("prefix sums on the 2x2 worked example") {
  Window w(Index{1, 1}, Index{2, 2});
  w.at(Index{1, 1}) = 1;
  w.at(Index{1, 2}) = 2;
  w.at(Index{2, 1}) = 3;
  w.at(Index{2, 2}) = 4;
  PrefixArray p = prefix_sums(w);
  CHECK(p.sums[0] == 1);
  CHECK(p.sums[1] == 3);
  CHECK(p.sums[2] == 4);
  CHECK(p.sums[3] == 10);

  // Row 2, columns 1..2: 3 + 4.
  CHECK(p.rect(Index{2, 1}, Index{2, 2}) == 7);
  // Full box.
  CHECK(p.rect(Index{1, 1}, Index{2, 2}) == 10);
  // Single cell.
  CHECK(p.rect(Index{2, 2}, Index{2, 2}) == 4);
}

TEST_CASE("rect queries match naive summation on random 3-d windows") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  Window w(Index{-1, 0, 2}, Index{4, 3, 5});
  for (double& v : w.values) v = val(gen);
  PrefixArray p = prefix_sums(w);

  std::uniform_int_distribution<std::int64_t> d0(-1, 2), d1(0, 2), d2(2, 6);
  for (int trial = 0; trial < 200; ++trial) {
    Index lo{d0(gen), d1(gen), d2(gen)};
    Index hi{d0(gen), d1(gen), d2(gen)};
    for (int k = 0; k < 3; ++k) {
      if (lo[k] > hi[k]) std::swap(lo[k], hi[k]);
    }
    double naive = 0.0;
    for_each_index(lo, hi, [&](const Index& i) { naive += w.at(i); });
    CHECK(p.rect(lo, hi) == doctest::Approx(naive).epsilon(1e-12));
  }
}

TEST_CASE("rect rejects boxes outside the window or inverted") {
  Window w(Index{1, 1}, Index{2, 2});
  PrefixArray p = prefix_sums(w);
  CHECK_THROWS_AS(p.rect(Index{0, 1}, Index{1, 1}), std::out_of_range);
  CHECK_THROWS_AS(p.rect(Index{2, 2}, Index{1, 1}), std::invalid_argument);
}
