#pragma once
// Field simulation: counter-based innovation generation and evaluation of
// linear / bilinear models on lattice windows. The direct convolution is the
// reference path; an FFT path (when built in) must agree to 1e-10.

#include <cstdint>

#include "rfclt/lattice.hpp"
#include "rfclt/models.hpp"

namespace rfclt {

// Innovation field over a padded box; values are reproducible functions of
// (spec.seed, absolute cell index).
struct InnovationArray {
  InnovationSpec spec;
  Window window;

  double at(const Index& cell) const { return window.at(cell); }
};

// Single-cell innovation value. For the column-MDS structure (d = 2 only)
// this reads the base draw at (n,m) and (n-1,m).
double innovation_value(const InnovationSpec& spec, const Index& cell);

// Materialize innovations over [origin - pad, origin + extent - 1].
InnovationArray gen_innovations(const InnovationSpec& spec, const Index& extent,
                                const Index& pad, const Index& origin);
InnovationArray gen_innovations(const InnovationSpec& spec, const Index& extent,
                                const Index& pad);  // origin = (1,...,1)

// Pad needed to evaluate the model on a window: support extent - 1 for the
// linear family, the componentwise max entry index for the bilinear one.
Index required_pad(const Model& m);

enum class ConvPath { kDirect, kFft };

bool fft_available();

// X_k = sum_j a_j xi_{k-j} for k in [origin, origin + extent - 1].
// Throws std::invalid_argument naming the missing index range when the
// innovation array does not cover the support's reach.
Window simulate_linear(const CoeffArray& c, const InnovationArray& xi, const Index& extent,
                       const Index& origin, ConvPath path = ConvPath::kDirect);

// X_k = sum_{(u,v)} a_{u,v} xi_{k-u} xi_{k-v}.
Window simulate_volterra(const VolterraCoeffs& c, const InnovationArray& xi,
                         const Index& extent, const Index& origin);

// Generate innovations with the model's spec and evaluate on
// [origin, origin + extent - 1].
Window simulate(const Model& m, const Index& extent, const Index& origin,
                ConvPath path = ConvPath::kDirect);
Window simulate(const Model& m, const Index& extent, ConvPath path = ConvPath::kDirect);

}  // namespace rfclt
