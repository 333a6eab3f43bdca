#include "rfclt/field_sim.hpp"

#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "rfclt/rng.hpp"

#ifdef RFCLT_HAVE_FFTW
#include <fftw3.h>
#endif

namespace rfclt {

namespace {

constexpr std::uint64_t kStreamInnov = 0x11d0u;

double base_draw(const InnovationSpec& spec, const Index& cell) {
  const CellBits b = cell_bits(spec.seed, kStreamInnov, cell);
  switch (spec.dist) {
    case Distribution::kStandardNormal:
      return normal_from_bits(b);
    case Distribution::kRademacher:
      return (b.lo & 1u) ? 1.0 : -1.0;
    case Distribution::kCenteredUniform:
      return 2.0 * u01(b.lo) - 1.0;
  }
  throw std::logic_error("base_draw: bad distribution");
}

}  // namespace

double innovation_value(const InnovationSpec& spec, const Index& cell) {
  if (spec.structure == Structure::kIid) return base_draw(spec, cell);
  if (cell.dim() != 2) {
    throw std::invalid_argument("innovation_value: column-mds structure requires d = 2");
  }
  // xi(n,m) = eps(n,m) * sqrt(2) * 1{eps(n-1,m) > 0}; a martingale difference
  // along the first axis, independent across columns.
  Index below = cell;
  below[0] -= 1;
  const double eps = base_draw(spec, cell);
  const double prev = base_draw(spec, below);
  return (prev > 0.0) ? eps * std::sqrt(2.0) : 0.0;
}

InnovationArray gen_innovations(const InnovationSpec& spec, const Index& extent,
                                const Index& pad, const Index& origin) {
  if (extent.dim() != pad.dim() || extent.dim() != origin.dim()) {
    throw std::invalid_argument("gen_innovations: dimension mismatch");
  }
  if (!all_ge(extent, 1)) {
    throw std::invalid_argument("gen_innovations: extent must be >= 1 per axis");
  }
  if (!all_ge(pad, 0)) {
    throw std::invalid_argument("gen_innovations: pad must be >= 0 per axis");
  }
  if (spec.structure == Structure::kColumnMds && extent.dim() != 2) {
    throw std::invalid_argument("gen_innovations: column-mds structure requires d = 2");
  }
  InnovationArray out;
  out.spec = spec;
  out.window = Window(origin - pad, extent + pad);
  for_each_index(out.window.origin, out.window.hi(), [&](const Index& cell) {
    out.window.at(cell) = innovation_value(spec, cell);
  });
  return out;
}

InnovationArray gen_innovations(const InnovationSpec& spec, const Index& extent,
                                const Index& pad) {
  return gen_innovations(spec, extent, pad, Index::ones(extent.dim()));
}

Index required_pad(const Model& m) {
  if (m.is_linear()) {
    return m.linear().support_extent - Index::ones(m.dim());
  }
  return m.volterra().max_index();
}

namespace {

void check_coverage(const Window& xi, const Index& lo_needed, const Index& hi_needed,
                    const char* what) {
  if (!all_le(xi.origin, lo_needed) || !all_ge(xi.hi(), hi_needed)) {
    throw std::invalid_argument(std::string(what) + ": innovations cover [" +
                                xi.origin.str() + ", " + xi.hi().str() +
                                "] but the window needs [" + lo_needed.str() + ", " +
                                hi_needed.str() + "]");
  }
}

Window simulate_linear_direct(const CoeffArray& c, const InnovationArray& xi,
                              const Index& extent, const Index& origin) {
  Window out(origin, extent);
  const Index s1 = c.support_extent - Index::ones(c.dim());
  for_each_index(origin, out.hi(), [&](const Index& k) {
    double acc = 0.0;
    for_each_index(Index::zeros(c.dim()), s1, [&](const Index& j) {
      const double aj = c.at(j);
      if (aj != 0.0) acc += aj * xi.window.at(k - j);
    });
    out.at(k) = acc;
  });
  return out;
}

#ifdef RFCLT_HAVE_FFTW
std::mutex g_fftw_plan_mutex;  // FFTW plan creation is not thread-safe

Window simulate_linear_fft(const CoeffArray& c, const InnovationArray& xi,
                           const Index& extent, const Index& origin) {
  const int d = c.dim();
  // Transform size per axis: linear convolution length n + 2(s-1), no wrap
  // in the slice [s-1, s-1+n).
  std::vector<int> dims(static_cast<size_t>(d));
  std::int64_t real_total = 1;
  for (int i = 0; i < d; ++i) {
    dims[static_cast<size_t>(i)] =
        static_cast<int>(extent[i] + 2 * (c.support_extent[i] - 1));
    real_total *= dims[static_cast<size_t>(i)];
  }
  std::int64_t cplx_total = 1;
  for (int i = 0; i < d - 1; ++i) cplx_total *= dims[static_cast<size_t>(i)];
  cplx_total *= dims[static_cast<size_t>(d - 1)] / 2 + 1;

  std::vector<double> xi_pad(static_cast<size_t>(real_total), 0.0);
  std::vector<double> a_pad(static_cast<size_t>(real_total), 0.0);

  auto flat = [&](const Index& rel) {
    std::int64_t off = 0;
    for (int i = 0; i < d; ++i) off = off * dims[static_cast<size_t>(i)] + rel[i];
    return static_cast<size_t>(off);
  };

  // xi relative to its own origin occupies [0, n + s - 1) per axis.
  const Index xi_lo = origin - (c.support_extent - Index::ones(d));
  for_each_index(xi_lo, origin + extent - Index::ones(d), [&](const Index& cell) {
    xi_pad[flat(cell - xi_lo)] = xi.window.at(cell);
  });
  for_each_index(Index::zeros(d), c.support_extent - Index::ones(d), [&](const Index& j) {
    a_pad[flat(j)] = c.at(j);
  });

  std::vector<std::complex<double>> fx(static_cast<size_t>(cplx_total));
  std::vector<std::complex<double>> fa(static_cast<size_t>(cplx_total));
  std::vector<double> conv(static_cast<size_t>(real_total));

  fftw_plan px, pa, pinv;
  {
    std::lock_guard<std::mutex> lock(g_fftw_plan_mutex);
    px = fftw_plan_dft_r2c(d, dims.data(), xi_pad.data(),
                           reinterpret_cast<fftw_complex*>(fx.data()), FFTW_ESTIMATE);
    pa = fftw_plan_dft_r2c(d, dims.data(), a_pad.data(),
                           reinterpret_cast<fftw_complex*>(fa.data()), FFTW_ESTIMATE);
    pinv = fftw_plan_dft_c2r(d, dims.data(), reinterpret_cast<fftw_complex*>(fx.data()),
                             conv.data(), FFTW_ESTIMATE);
  }
  fftw_execute(px);
  fftw_execute(pa);
  for (size_t i = 0; i < fx.size(); ++i) fx[i] *= fa[i];
  fftw_execute(pinv);
  {
    std::lock_guard<std::mutex> lock(g_fftw_plan_mutex);
    fftw_destroy_plan(px);
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pinv);
  }

  const double scale = 1.0 / static_cast<double>(real_total);
  Window out(origin, extent);
  const Index shift = c.support_extent - Index::ones(d);  // conv offset s-1
  for_each_index(origin, out.hi(), [&](const Index& k) {
    out.at(k) = conv[flat(k - origin + shift)] * scale;
  });
  return out;
}
#endif

}  // namespace

bool fft_available() {
#ifdef RFCLT_HAVE_FFTW
  return true;
#else
  return false;
#endif
}

Window simulate_linear(const CoeffArray& c, const InnovationArray& xi, const Index& extent,
                       const Index& origin, ConvPath path) {
  if (c.dim() != extent.dim() || c.dim() != origin.dim() || c.dim() != xi.window.dim()) {
    throw std::invalid_argument("simulate_linear: dimension mismatch");
  }
  if (!all_ge(extent, 1)) {
    throw std::invalid_argument("simulate_linear: extent must be >= 1 per axis");
  }
  const Index lo_needed = origin - (c.support_extent - Index::ones(c.dim()));
  const Index hi_needed = origin + extent - Index::ones(c.dim());
  check_coverage(xi.window, lo_needed, hi_needed, "simulate_linear");
  if (path == ConvPath::kFft) {
#ifdef RFCLT_HAVE_FFTW
    return simulate_linear_fft(c, xi, extent, origin);
#else
    throw std::runtime_error("simulate_linear: FFT path not built in");
#endif
  }
  return simulate_linear_direct(c, xi, extent, origin);
}

Window simulate_volterra(const VolterraCoeffs& c, const InnovationArray& xi,
                         const Index& extent, const Index& origin) {
  if (c.dim() != extent.dim() || c.dim() != origin.dim() || c.dim() != xi.window.dim()) {
    throw std::invalid_argument("simulate_volterra: dimension mismatch");
  }
  if (!all_ge(extent, 1)) {
    throw std::invalid_argument("simulate_volterra: extent must be >= 1 per axis");
  }
  const Index lo_needed = origin - c.max_index();
  const Index hi_needed = origin + extent - Index::ones(c.dim());
  check_coverage(xi.window, lo_needed, hi_needed, "simulate_volterra");

  Window out(origin, extent);
  for_each_index(origin, out.hi(), [&](const Index& k) {
    double acc = 0.0;
    for (const auto& e : c.entries) {
      acc += e.value * xi.window.at(k - e.u) * xi.window.at(k - e.v);
    }
    out.at(k) = acc;
  });
  return out;
}

Window simulate(const Model& m, const Index& extent, const Index& origin, ConvPath path) {
  const InnovationArray xi = gen_innovations(m.innovations, extent, required_pad(m), origin);
  if (m.is_linear()) return simulate_linear(m.linear(), xi, extent, origin, path);
  return simulate_volterra(m.volterra(), xi, extent, origin);
}

Window simulate(const Model& m, const Index& extent, ConvPath path) {
  return simulate(m, extent, Index::ones(extent.dim()), path);
}

}  // namespace rfclt
