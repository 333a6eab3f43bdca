#include "rfclt/lattice.hpp"

#include <limits>
#include <sstream>
#include <stdexcept>

namespace rfclt {

namespace {

void check_dim(int nd, const char* what) {
  if (nd < 1 || nd > kMaxDim) {
    throw std::invalid_argument(std::string(what) + ": dimension must be in [1," +
                                std::to_string(kMaxDim) + "], got " + std::to_string(nd));
  }
}

void check_same_dim(const Index& a, const Index& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch " +
                                std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
}

}  // namespace

Index::Index(std::initializer_list<std::int64_t> xs) {
  if (xs.size() < 1 || xs.size() > static_cast<size_t>(kMaxDim)) {
    throw std::invalid_argument("Index: needs 1.." + std::to_string(kMaxDim) + " components");
  }
  nd = static_cast<int>(xs.size());
  int i = 0;
  for (std::int64_t v : xs) c[static_cast<size_t>(i++)] = v;
}

bool Index::operator==(const Index& o) const {
  if (nd != o.nd) return false;
  for (int i = 0; i < nd; ++i) {
    if (c[static_cast<size_t>(i)] != o.c[static_cast<size_t>(i)]) return false;
  }
  return true;
}

Index Index::filled(int dim, std::int64_t v) {
  check_dim(dim, "Index::filled");
  Index r;
  r.nd = dim;
  for (int i = 0; i < dim; ++i) r[i] = v;
  return r;
}

std::string Index::str() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < nd; ++i) os << (i ? "," : "") << c[static_cast<size_t>(i)];
  os << ')';
  return os.str();
}

Index operator+(const Index& a, const Index& b) {
  check_same_dim(a, b, "Index+");
  Index r = a;
  for (int i = 0; i < a.dim(); ++i) r[i] += b[i];
  return r;
}

Index operator-(const Index& a, const Index& b) {
  check_same_dim(a, b, "Index-");
  Index r = a;
  for (int i = 0; i < a.dim(); ++i) r[i] -= b[i];
  return r;
}

Index cwise_min(const Index& a, const Index& b) {
  check_same_dim(a, b, "cwise_min");
  Index r = a;
  for (int i = 0; i < a.dim(); ++i) r[i] = std::min(a[i], b[i]);
  return r;
}

Index cwise_max(const Index& a, const Index& b) {
  check_same_dim(a, b, "cwise_max");
  Index r = a;
  for (int i = 0; i < a.dim(); ++i) r[i] = std::max(a[i], b[i]);
  return r;
}

bool all_le(const Index& a, const Index& b) {
  check_same_dim(a, b, "all_le");
  for (int i = 0; i < a.dim(); ++i) {
    if (a[i] > b[i]) return false;
  }
  return true;
}

bool all_ge(const Index& a, const Index& b) { return all_le(b, a); }

bool all_ge(const Index& a, std::int64_t v) {
  for (int i = 0; i < a.dim(); ++i) {
    if (a[i] < v) return false;
  }
  return true;
}

std::int64_t product_norm(const Index& n) {
  check_dim(n.dim(), "product_norm");
  std::int64_t p = 1;
  for (int i = 0; i < n.dim(); ++i) {
    std::int64_t v = n[i];
    if (v != 0 && (std::abs(p) > std::numeric_limits<std::int64_t>::max() / std::abs(v))) {
      throw std::overflow_error("product_norm: overflow for " + n.str());
    }
    p *= v;
  }
  return p;
}

void for_each_index(const Index& lo, const Index& hi,
                    const std::function<void(const Index&)>& fn) {
  check_same_dim(lo, hi, "for_each_index");
  const int d = lo.dim();
  for (int i = 0; i < d; ++i) {
    if (lo[i] > hi[i]) return;
  }
  Index cur = lo;
  for (;;) {
    fn(cur);
    int axis = d - 1;
    while (axis >= 0) {
      if (++cur[axis] <= hi[axis]) break;
      cur[axis] = lo[axis];
      --axis;
    }
    if (axis < 0) return;
  }
}

Window::Window(Index origin_, Index extent_) : origin(origin_), extent(extent_) {
  check_same_dim(origin, extent, "Window");
  check_dim(extent.dim(), "Window");
  if (!all_ge(extent, 1)) {
    throw std::invalid_argument("Window: extent must be >= 1 per axis, got " + extent.str());
  }
  const std::int64_t n = product_norm(extent);
  if (n > (std::int64_t(1) << 31)) {
    throw std::invalid_argument("Window: too many cells: " + std::to_string(n));
  }
  values.assign(static_cast<size_t>(n), 0.0);
}

Index Window::hi() const {
  Index h = origin;
  for (int i = 0; i < dim(); ++i) h[i] = origin[i] + extent[i] - 1;
  return h;
}

bool Window::contains(const Index& abs) const {
  if (abs.dim() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    const std::int64_t r = abs[i] - origin[i];
    if (r < 0 || r >= extent[i]) return false;
  }
  return true;
}

std::array<std::int64_t, kMaxDim> Window::strides() const {
  std::array<std::int64_t, kMaxDim> s{};
  const int d = dim();
  s[static_cast<size_t>(d - 1)] = 1;
  for (int i = d - 2; i >= 0; --i) {
    s[static_cast<size_t>(i)] = s[static_cast<size_t>(i + 1)] * extent[i + 1];
  }
  return s;
}

size_t Window::offset_of(const Index& abs) const {
  if (abs.dim() != dim()) {
    throw std::invalid_argument("Window::offset_of: dimension mismatch");
  }
  size_t off = 0;
  for (int i = 0; i < dim(); ++i) {
    const std::int64_t r = abs[i] - origin[i];
    if (r < 0 || r >= extent[i]) {
      throw std::out_of_range("Window::offset_of: " + abs.str() + " outside [" +
                              origin.str() + ", " + hi().str() + "]");
    }
    off = off * static_cast<size_t>(extent[i]) + static_cast<size_t>(r);
  }
  return off;
}

PrefixArray prefix_sums(const Window& w) {
  check_dim(w.dim(), "prefix_sums");
  PrefixArray p;
  p.origin = w.origin;
  p.extent = w.extent;
  p.sums = w.values;

  // One accumulation pass per axis turns values into inclusive prefix sums.
  const auto st = w.strides();
  const size_t total = p.sums.size();
  for (int axis = 0; axis < w.dim(); ++axis) {
    const size_t n = static_cast<size_t>(w.extent[axis]);
    const size_t stride = static_cast<size_t>(st[static_cast<size_t>(axis)]);
    const size_t block = n * stride;  // cells spanned by one full sweep of this axis
    for (size_t base = 0; base < total; base += block) {
      for (size_t inner = 0; inner < stride; ++inner) {
        size_t idx = base + inner + stride;
        for (size_t i = 1; i < n; ++i, idx += stride) {
          p.sums[idx] += p.sums[idx - stride];
        }
      }
    }
  }
  return p;
}

double PrefixArray::rect(const Index& lo, const Index& hi) const {
  check_same_dim(lo, hi, "PrefixArray::rect");
  if (lo.dim() != dim()) {
    throw std::invalid_argument("PrefixArray::rect: dimension mismatch");
  }
  const int d = dim();
  for (int i = 0; i < d; ++i) {
    if (lo[i] > hi[i]) {
      throw std::invalid_argument("PrefixArray::rect: empty box " + lo.str() + ".." + hi.str());
    }
    if (lo[i] < origin[i] || hi[i] > origin[i] + extent[i] - 1) {
      throw std::out_of_range("PrefixArray::rect: box " + lo.str() + ".." + hi.str() +
                              " outside window");
    }
  }

  // 2^d inclusion-exclusion on the prefix array; a corner below the origin
  // in any axis contributes zero.
  std::array<std::int64_t, kMaxDim> stride{};
  stride[static_cast<size_t>(d - 1)] = 1;
  for (int i = d - 2; i >= 0; --i) {
    stride[static_cast<size_t>(i)] = stride[static_cast<size_t>(i + 1)] * extent[i + 1];
  }

  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    std::int64_t off = 0;
    bool outside = false;
    int bits = 0;
    for (int i = 0; i < d; ++i) {
      std::int64_t r;
      if (mask & (1u << i)) {
        r = lo[i] - 1 - origin[i];
        ++bits;
      } else {
        r = hi[i] - origin[i];
      }
      if (r < 0) {
        outside = true;
        break;
      }
      off += r * stride[static_cast<size_t>(i)];
    }
    if (outside) continue;
    const double v = sums[static_cast<size_t>(off)];
    total += (bits % 2 == 0) ? v : -v;
  }
  return total;
}

}  // namespace rfclt
