#pragma once
// Model descriptors: linear and bilinear (Volterra) coefficient families
// over Z^d together with the innovation specification.

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "rfclt/lattice.hpp"

namespace rfclt {

enum class Distribution {
  kStandardNormal,   // N(0,1)
  kRademacher,       // +-1 with probability 1/2
  kCenteredUniform,  // uniform on [-1,1], variance 1/3
};

enum class Structure {
  kIid,
  kColumnMds,  // d=2 only: xi(n,m) = eps(n,m) * g(eps(n-1,m)), g(x) = sqrt(2)*1{x>0}
};

struct InnovationSpec {
  Distribution dist = Distribution::kStandardNormal;
  Structure structure = Structure::kIid;
  std::uint64_t seed = 0;
};

// Var(xi) under the spec; the column-MDS transform preserves the base
// variance because E g^2 = 1.
double innovation_variance(const InnovationSpec& spec);

// Dense linear coefficients a_j for j in [0, support_extent). Entries outside
// the stored box are zero.
struct CoeffArray {
  Index support_extent;
  std::vector<double> a;  // row-major, same layout as Window

  int dim() const { return support_extent.dim(); }
  std::int64_t size() const { return product_norm(support_extent); }
  bool in_support(const Index& j) const;
  double at(const Index& j) const;       // zero outside the box
  double& slot(const Index& j);          // throws outside the box
  double sum_sq() const;
  double sum_abs() const;

  static CoeffArray zeros(Index support_extent);
  // Convenience for sparse construction: list of (index, value).
  static CoeffArray from_entries(int dim, const std::vector<std::pair<Index, double>>& entries);
};

// Bilinear coefficients a_{u,v} with zero diagonal (a_{u,u} = 0 required).
struct VolterraEntry {
  Index u;
  Index v;
  double value = 0.0;
};

struct VolterraCoeffs {
  int nd = 0;
  std::vector<VolterraEntry> entries;

  int dim() const { return nd; }
  double lookup(const Index& u, const Index& v) const;  // zero if absent
  Index max_index() const;  // componentwise max over all u and v

  static VolterraCoeffs from_entries(int dim, const std::vector<VolterraEntry>& entries);
};

struct Model {
  std::variant<CoeffArray, VolterraCoeffs> coeffs;
  InnovationSpec innovations;

  bool is_linear() const { return std::holds_alternative<CoeffArray>(coeffs); }
  const CoeffArray& linear() const { return std::get<CoeffArray>(coeffs); }
  const VolterraCoeffs& volterra() const { return std::get<VolterraCoeffs>(coeffs); }
  int dim() const;
};

// Product family a_u = prod_i (-1)^{u_i} / (sqrt(u_i) * log(u_i)) on
// [2, radius]^d; components below 2 give a zero factor (log 1 = 0 makes the
// u_i = 1 term meaningless). The absolute series diverges as radius grows.
CoeffArray alternating_coeffs(int dim, std::int64_t radius);

}  // namespace rfclt
