#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rfclt/field_sim.hpp"

using namespace rfclt;

namespace {

Model ma_half_model(std::uint64_t seed) {
  Model m;
  m.coeffs = CoeffArray::from_entries(2, {{Index{0, 0}, 0.5}, {Index{0, 1}, 0.5}});
  m.innovations.seed = seed;
  return m;
}

}  // namespace

TEST_CASE("generated innovations cover the padded box and respect the value sets") {
  InnovationSpec spec;
  spec.dist = Distribution::kRademacher;
  spec.seed = 11;
  InnovationArray xi = gen_innovations(spec, Index{3, 4}, Index{1, 2});
  CHECK(xi.window.origin == Index{0, -1});
  CHECK(xi.window.hi() == Index{3, 4});
  for (double v : xi.window.values) CHECK(std::abs(v) == 1.0);

  spec.dist = Distribution::kCenteredUniform;
  xi = gen_innovations(spec, Index{3, 4}, Index{0, 0});
  for (double v : xi.window.values) {
    CHECK(v > -1.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("linear simulation equals the hand convolution for the two-term average") {
  const Model m = ma_half_model(5);
  InnovationSpec spec = m.innovations;
  const InnovationArray xi = gen_innovations(spec, Index{4, 4}, required_pad(m));
  const Window x = simulate_linear(m.linear(), xi, Index{4, 4}, Index{1, 1});
  for_each_index(Index{1, 1}, Index{4, 4}, [&](const Index& k) {
    const double want = 0.5 * xi.at(k) + 0.5 * xi.at(k - Index{0, 1});
    CHECK(x.at(k) == doctest::Approx(want).epsilon(1e-15));
  });
}

TEST_CASE("simulation windows agree wherever they overlap") {
  const Model m = ma_half_model(17);
  const Window big = simulate(m, Index{6, 6});
  const Window small = simulate(m, Index{2, 3}, Index{3, 4});
  for_each_index(Index{3, 4}, Index{4, 6}, [&](const Index& k) {
    CHECK(small.at(k) == doctest::Approx(big.at(k)).epsilon(1e-15));
  });
}

TEST_CASE("insufficient innovation coverage is rejected with the offending range") {
  const Model m = ma_half_model(1);
  InnovationSpec spec = m.innovations;
  const InnovationArray xi = gen_innovations(spec, Index{4, 4}, Index{0, 0});
  CHECK_THROWS_AS(simulate_linear(m.linear(), xi, Index{4, 4}, Index{1, 1}),
                  std::invalid_argument);
}

TEST_CASE("volterra simulation equals the hand bilinear form") {
  Model m;
  m.coeffs = VolterraCoeffs::from_entries(
      2, {{Index{0, 0}, Index{0, 1}, 1.0}, {Index{1, 0}, Index{0, 1}, -0.5}});
  m.innovations.seed = 23;
  InnovationSpec spec = m.innovations;
  const InnovationArray xi = gen_innovations(spec, Index{3, 3}, required_pad(m));
  const Window x = simulate_volterra(m.volterra(), xi, Index{3, 3}, Index{1, 1});
  for_each_index(Index{1, 1}, Index{3, 3}, [&](const Index& k) {
    const double want = xi.at(k) * xi.at(k - Index{0, 1}) -
                        0.5 * xi.at(k - Index{1, 0}) * xi.at(k - Index{0, 1});
    CHECK(x.at(k) == doctest::Approx(want).epsilon(1e-15));
  });
}

TEST_CASE("column-mds innovations gate on the row below") {
  for (Distribution dist :
       {Distribution::kStandardNormal, Distribution::kRademacher}) {
    InnovationSpec mds;
    mds.dist = dist;
    mds.structure = Structure::kColumnMds;
    mds.seed = 31;
    InnovationSpec base = mds;
    base.structure = Structure::kIid;

    const InnovationArray xi = gen_innovations(mds, Index{6, 6}, Index{1, 1});
    for_each_index(Index{0, 0}, Index{6, 6}, [&](const Index& cell) {
      const double eps = innovation_value(base, cell);
      const double eps_below = innovation_value(base, cell - Index{1, 0});
      const double want = eps_below > 0.0 ? eps * std::sqrt(2.0) : 0.0;
      CHECK(xi.at(cell) == doctest::Approx(want).epsilon(1e-15));
    });
  }
}

TEST_CASE("column-mds requires two dimensions") {
  InnovationSpec spec;
  spec.structure = Structure::kColumnMds;
  CHECK_THROWS_AS(gen_innovations(spec, Index{4}, Index{1}), std::invalid_argument);
}

TEST_CASE("required pad covers the support reach") {
  Model lin = ma_half_model(0);
  CHECK(required_pad(lin) == Index{0, 1});
  Model vol;
  vol.coeffs = VolterraCoeffs::from_entries(2, {{Index{2, 0}, Index{1, 3}, 1.0}});
  CHECK(required_pad(vol) == Index{2, 3});
}

TEST_CASE("fft path matches the direct convolution") {
  if (!fft_available()) return;
  Model m;
  m.coeffs = CoeffArray::from_entries(
      2, {{Index{0, 0}, 0.3}, {Index{1, 2}, -0.7}, {Index{2, 1}, 0.25}, {Index{2, 2}, 1.1}});
  m.innovations.seed = 77;
  InnovationSpec spec = m.innovations;
  const InnovationArray xi = gen_innovations(spec, Index{9, 7}, required_pad(m));
  const Window direct = simulate_linear(m.linear(), xi, Index{9, 7}, Index{1, 1},
                                        ConvPath::kDirect);
  const Window fft = simulate_linear(m.linear(), xi, Index{9, 7}, Index{1, 1},
                                     ConvPath::kFft);
  REQUIRE(direct.values.size() == fft.values.size());
  for (size_t i = 0; i < direct.values.size(); ++i) {
    CHECK(fft.values[i] == doctest::Approx(direct.values[i]).epsilon(1e-10));
  }
}
