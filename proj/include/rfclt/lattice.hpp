#pragma once
// Dense windows on the integer lattice Z^d (1 <= d <= 4) plus prefix-sum
// rectangle queries. Storage is row-major with the LAST axis contiguous;
// by convention the last axis is also the blocking axis used by the
// martingale decomposition.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace rfclt {

inline constexpr int kMaxDim = 4;

// Multi-index with explicit dimension. Components may be negative.
struct Index {
  int nd = 0;
  std::array<std::int64_t, kMaxDim> c{};

  Index() = default;
  Index(std::initializer_list<std::int64_t> xs);

  int dim() const { return nd; }
  std::int64_t operator[](int i) const { return c[static_cast<size_t>(i)]; }
  std::int64_t& operator[](int i) { return c[static_cast<size_t>(i)]; }

  bool operator==(const Index& o) const;
  bool operator!=(const Index& o) const { return !(*this == o); }

  static Index filled(int dim, std::int64_t v);
  static Index ones(int dim) { return filled(dim, 1); }
  static Index zeros(int dim) { return filled(dim, 0); }

  std::string str() const;  // "(a,b,...)" for diagnostics
};

Index operator+(const Index& a, const Index& b);
Index operator-(const Index& a, const Index& b);
Index cwise_min(const Index& a, const Index& b);
Index cwise_max(const Index& a, const Index& b);

// Componentwise comparisons (partial order on Z^d).
bool all_le(const Index& a, const Index& b);
bool all_ge(const Index& a, const Index& b);
bool all_ge(const Index& a, std::int64_t v);

// |n| = n_1 * ... * n_d. Throws std::overflow_error if it does not fit.
std::int64_t product_norm(const Index& n);

// Iterate the box [lo, hi] (inclusive) in lexicographic order, last axis
// fastest. No-op when the box is empty in some axis.
void for_each_index(const Index& lo, const Index& hi,
                    const std::function<void(const Index&)>& fn);

// Dense window of real values over [origin, origin + extent - 1].
struct Window {
  Index origin;
  Index extent;                // all components >= 1
  std::vector<double> values;  // row-major, last axis contiguous

  Window() = default;
  Window(Index origin_, Index extent_);  // zero-initialized

  int dim() const { return extent.dim(); }
  std::int64_t cell_count() const { return product_norm(extent); }
  Index hi() const;  // inclusive upper corner

  bool contains(const Index& abs) const;
  size_t offset_of(const Index& abs) const;  // throws std::out_of_range
  double at(const Index& abs) const { return values[offset_of(abs)]; }
  double& at(const Index& abs) { return values[offset_of(abs)]; }

  std::array<std::int64_t, kMaxDim> strides() const;
};

// Prefix sums of a window: sums[r] = sum of values over [origin, origin + r]
// for every relative index r, built with one in-place pass per axis.
struct PrefixArray {
  Index origin;
  Index extent;
  std::vector<double> sums;

  int dim() const { return extent.dim(); }

  // Sum of the source window over the absolute box [lo, hi] (inclusive)
  // by 2^d inclusion-exclusion. Throws std::out_of_range if the box is
  // not contained in the window, std::invalid_argument if lo > hi.
  double rect(const Index& lo, const Index& hi) const;
};

PrefixArray prefix_sums(const Window& w);

inline double rect_sum(const PrefixArray& p, const Index& lo, const Index& hi) {
  return p.rect(lo, hi);
}

}  // namespace rfclt
