#include "rfclt/models.hpp"

#include <cmath>
#include <stdexcept>

namespace rfclt {

double innovation_variance(const InnovationSpec& spec) {
  switch (spec.dist) {
    case Distribution::kStandardNormal:
      return 1.0;
    case Distribution::kRademacher:
      return 1.0;
    case Distribution::kCenteredUniform:
      return 1.0 / 3.0;
  }
  throw std::logic_error("innovation_variance: bad distribution");
}

bool CoeffArray::in_support(const Index& j) const {
  if (j.dim() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    if (j[i] < 0 || j[i] >= support_extent[i]) return false;
  }
  return true;
}

double CoeffArray::at(const Index& j) const {
  if (!in_support(j)) return 0.0;
  size_t off = 0;
  for (int i = 0; i < dim(); ++i) {
    off = off * static_cast<size_t>(support_extent[i]) + static_cast<size_t>(j[i]);
  }
  return a[off];
}

double& CoeffArray::slot(const Index& j) {
  if (!in_support(j)) {
    throw std::out_of_range("CoeffArray::slot: " + j.str() + " outside support box " +
                            support_extent.str());
  }
  size_t off = 0;
  for (int i = 0; i < dim(); ++i) {
    off = off * static_cast<size_t>(support_extent[i]) + static_cast<size_t>(j[i]);
  }
  return a[off];
}

double CoeffArray::sum_sq() const {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

double CoeffArray::sum_abs() const {
  double s = 0.0;
  for (double v : a) s += std::abs(v);
  return s;
}

CoeffArray CoeffArray::zeros(Index support_extent) {
  if (!all_ge(support_extent, 1)) {
    throw std::invalid_argument("CoeffArray: support extent must be >= 1 per axis, got " +
                                support_extent.str());
  }
  CoeffArray c;
  c.support_extent = support_extent;
  c.a.assign(static_cast<size_t>(product_norm(support_extent)), 0.0);
  return c;
}

CoeffArray CoeffArray::from_entries(int dim,
                                    const std::vector<std::pair<Index, double>>& entries) {
  Index ext = Index::ones(dim);
  for (const auto& [j, v] : entries) {
    if (j.dim() != dim) {
      throw std::invalid_argument("CoeffArray::from_entries: index " + j.str() +
                                  " has wrong dimension");
    }
    if (!all_ge(j, 0)) {
      throw std::invalid_argument("CoeffArray::from_entries: negative index " + j.str());
    }
    (void)v;
    for (int i = 0; i < dim; ++i) ext[i] = std::max(ext[i], j[i] + 1);
  }
  CoeffArray c = zeros(ext);
  for (const auto& [j, v] : entries) c.slot(j) += v;
  return c;
}

double VolterraCoeffs::lookup(const Index& u, const Index& v) const {
  for (const auto& e : entries) {
    if (e.u == u && e.v == v) return e.value;
  }
  return 0.0;
}

Index VolterraCoeffs::max_index() const {
  Index m = Index::zeros(nd);
  for (const auto& e : entries) {
    m = cwise_max(m, cwise_max(e.u, e.v));
  }
  return m;
}

VolterraCoeffs VolterraCoeffs::from_entries(int dim, const std::vector<VolterraEntry>& entries) {
  VolterraCoeffs c;
  c.nd = dim;
  for (const auto& e : entries) {
    if (e.u.dim() != dim || e.v.dim() != dim) {
      throw std::invalid_argument("VolterraCoeffs: entry dimension mismatch");
    }
    if (!all_ge(e.u, 0) || !all_ge(e.v, 0)) {
      throw std::invalid_argument("VolterraCoeffs: negative index " + e.u.str() + "," +
                                  e.v.str());
    }
    if (e.u == e.v) {
      throw std::invalid_argument("VolterraCoeffs: diagonal entry at " + e.u.str() +
                                  " must be zero");
    }
    if (e.value != 0.0) c.entries.push_back(e);
  }
  return c;
}

int Model::dim() const {
  return is_linear() ? linear().dim() : volterra().dim();
}

CoeffArray alternating_coeffs(int dim, std::int64_t radius) {
  if (radius < 2) {
    throw std::invalid_argument("alternating_coeffs: radius must be >= 2");
  }
  CoeffArray c = CoeffArray::zeros(Index::filled(dim, radius + 1));
  std::vector<double> f(static_cast<size_t>(radius + 1), 0.0);
  for (std::int64_t t = 2; t <= radius; ++t) {
    const double mag = 1.0 / (std::sqrt(static_cast<double>(t)) * std::log(static_cast<double>(t)));
    f[static_cast<size_t>(t)] = (t % 2 == 0) ? mag : -mag;
  }
  for_each_index(Index::zeros(dim), Index::filled(dim, radius), [&](const Index& u) {
    double v = 1.0;
    for (int i = 0; i < dim; ++i) v *= f[static_cast<size_t>(u[i])];
    if (v != 0.0) c.slot(u) = v;
  });
  return c;
}

}  // namespace rfclt
