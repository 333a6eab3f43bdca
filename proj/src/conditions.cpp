#include "rfclt/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rfclt/stats.hpp"

namespace rfclt {

namespace {

void check_positive_index(const Index& j, const char* what) {
  if (!all_ge(j, 1)) {
    throw std::invalid_argument(std::string(what) + ": index must be >= 1 per axis, got " +
                                j.str());
  }
}

double inv_pow32(std::int64_t n) {  // n^{-3/2}
  const double x = static_cast<double>(n);
  return 1.0 / (x * std::sqrt(x));
}

}  // namespace

LinearBEvaluator::LinearBEvaluator(const CoeffArray& c) : support_extent(c.support_extent) {
  Window w(Index::zeros(c.dim()), c.support_extent);
  w.values = c.a;
  prefix = prefix_sums(w);
}

double LinearBEvaluator::operator()(const Index& j) const {
  check_positive_index(j, "linear_b");
  if (j.dim() != support_extent.dim()) {
    throw std::invalid_argument("linear_b: dimension mismatch");
  }
  const int d = support_extent.dim();
  // Inner sums vanish unless every axis still reaches the support, i.e.
  // i_k <= s_k - 2.
  for (int i = 0; i < d; ++i) {
    if (support_extent[i] < 2) return 0.0;
  }
  const Index s1 = support_extent - Index::ones(d);  // top support corner
  Index i_hi = support_extent;
  for (int i = 0; i < d; ++i) i_hi[i] -= 2;

  double b2 = 0.0;
  for_each_index(Index::zeros(d), i_hi, [&](const Index& i) {
    const Index lo = i + Index::ones(d);
    const Index hi = cwise_min(i + j, s1);
    const double inner = prefix.rect(lo, hi);
    b2 += inner * inner;
  });
  return std::sqrt(b2);
}

double linear_b(const CoeffArray& c, const Index& j) { return LinearBEvaluator(c)(j); }

double volterra_c(const VolterraCoeffs& c, const Index& u, const Index& v, const Index& j) {
  check_positive_index(j, "volterra_c");
  if (u.dim() != c.dim() || v.dim() != c.dim() || j.dim() != c.dim()) {
    throw std::invalid_argument("volterra_c: dimension mismatch");
  }
  double total = 0.0;
  for (const auto& e : c.entries) {
    // Contributes iff e = (k+u, k+v) for one k in [1, j].
    const Index k = e.u - u;
    if (e.v - v == k && all_ge(k, 1) && all_le(k, j)) total += e.value;
  }
  return total;
}

double volterra_b(const VolterraCoeffs& c, const Index& j) {
  check_positive_index(j, "volterra_b");
  if (j.dim() != c.dim()) {
    throw std::invalid_argument("volterra_b: dimension mismatch");
  }
  const int d = c.dim();

  // Candidate (u,v) pairs with a possibly nonzero c_{u,v}(j): entry shifted
  // back by k in [1, min(j, u_entry, v_entry)].
  std::vector<std::pair<Index, Index>> cand;
  for (const auto& e : c.entries) {
    const Index k_hi = cwise_min(j, cwise_min(e.u, e.v));
    if (!all_ge(k_hi, 1)) continue;
    for_each_index(Index::ones(d), k_hi, [&](const Index& k) {
      cand.emplace_back(e.u - k, e.v - k);
    });
  }
  std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
    for (int i = 0; i < a.first.dim(); ++i) {
      if (a.first[i] != b.first[i]) return a.first[i] < b.first[i];
    }
    for (int i = 0; i < a.second.dim(); ++i) {
      if (a.second[i] != b.second[i]) return a.second[i] < b.second[i];
    }
    return false;
  });
  cand.erase(std::unique(cand.begin(), cand.end(),
                         [](const auto& a, const auto& b) {
                           return a.first == b.first && a.second == b.second;
                         }),
             cand.end());

  double b2 = 0.0;
  double scale = 0.0;
  for (const auto& [u, v] : cand) {
    if (u == v) continue;  // diagonal excluded
    const double cuv = volterra_c(c, u, v, j);
    if (cuv == 0.0) continue;
    const double cvu = volterra_c(c, v, u, j);
    const double term = cuv * cuv + cuv * cvu;
    b2 += term;
    scale += std::abs(cuv * cuv) + std::abs(cuv * cvu);
  }
  if (b2 < 0.0) {
    if (b2 < -1e-9 * std::max(scale, 1.0)) {
      throw std::runtime_error("volterra_b: negative total " + std::to_string(b2));
    }
    b2 = 0.0;
  }
  return std::sqrt(b2);
}

double projective_norm_linear(const CoeffArray& c, const Index& u, double sigma_sq) {
  if (!(sigma_sq >= 0.0)) {
    throw std::invalid_argument("projective_norm_linear: sigma_sq must be >= 0");
  }
  return std::sqrt(sigma_sq) * linear_b(c, u);
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kFiniteByExactness:
      return "finite-by-exactness";
    case Verdict::kFiniteByBound:
      return "finite-by-bound";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "?";
}

MWReport mw_series(const std::function<double(const Index&)>& b, int dim, const Index& j_max,
                   const TailInfo& tail) {
  if (j_max.dim() != dim) {
    throw std::invalid_argument("mw_series: j_max dimension mismatch");
  }
  check_positive_index(j_max, "mw_series");

  MWReport rep;
  rep.series = "b-series";

  // Cache b over [1, j_max]; needed again by the tail evaluation.
  Window bcache(Index::ones(dim), j_max);
  std::vector<double> terms;
  terms.reserve(static_cast<size_t>(product_norm(j_max)));
  for_each_index(Index::ones(dim), j_max, [&](const Index& j) {
    const double bj = b(j);
    if (!(bj >= 0.0)) {
      throw std::invalid_argument("mw_series: b must be >= 0, got " + std::to_string(bj) +
                                  " at " + j.str());
    }
    bcache.at(j) = bj;
    const double t = bj * inv_pow32(product_norm(j));
    rep.terms.push_back({j, t});
    terms.push_back(t);
  });
  rep.partial_sum = pairwise_sum(terms);

  switch (tail.kind) {
    case TailInfo::Kind::kNone:
      rep.verdict = Verdict::kInconclusive;
      break;
    case TailInfo::Kind::kZeroBeyond:
      rep.verdict = Verdict::kFiniteByExactness;
      break;
    case TailInfo::Kind::kConstantBeyond: {
      if (tail.constant_from.dim() != dim || !all_ge(tail.constant_from, 1) ||
          !all_ge(j_max, tail.constant_from)) {
        rep.verdict = Verdict::kInconclusive;
        break;
      }
      // Beyond the box, b_j = b at the clipped index. Split the complement
      // of [1, J] by the subset S of axes that overflow; each overflowing
      // axis integrates to at most 2/sqrt(J_k), the rest sum exactly.
      std::vector<double> parts;
      for (unsigned mask = 1; mask < (1u << dim); ++mask) {
        double factor = 1.0;
        Index lo = Index::ones(dim);
        Index hi = j_max;
        for (int i = 0; i < dim; ++i) {
          if (mask & (1u << i)) {
            factor *= 2.0 / std::sqrt(static_cast<double>(j_max[i]));
            lo[i] = j_max[i];
            hi[i] = j_max[i];
          }
        }
        double inner = 0.0;
        for_each_index(lo, hi, [&](const Index& j) {
          double w = 1.0;
          for (int i = 0; i < dim; ++i) {
            if (!(mask & (1u << i))) w *= inv_pow32(j[i]);
          }
          inner += bcache.at(j) * w;
        });
        parts.push_back(factor * inner);
      }
      rep.tail_estimate = pairwise_sum(parts);
      rep.verdict = Verdict::kFiniteByBound;
      break;
    }
  }
  return rep;
}

namespace {

// Suffix sums of a^2 over the support box: ss(i) = sum_{w >= i} a_w^2.
Window squared_suffix_sums(const CoeffArray& c) {
  Window w(Index::zeros(c.dim()), c.support_extent);
  for (size_t i = 0; i < c.a.size(); ++i) w.values[i] = c.a[i] * c.a[i];
  const auto st = w.strides();
  const size_t total = w.values.size();
  for (int axis = 0; axis < c.dim(); ++axis) {
    const size_t n = static_cast<size_t>(w.extent[axis]);
    const size_t stride = static_cast<size_t>(st[static_cast<size_t>(axis)]);
    const size_t block = n * stride;
    for (size_t base = 0; base < total; base += block) {
      for (size_t inner = 0; inner < stride; ++inner) {
        size_t idx = base + inner + (n - 1) * stride;
        for (size_t i = 1; i < n; ++i, idx -= stride) {
          w.values[idx - stride] += w.values[idx];
        }
      }
    }
  }
  return w;
}

}  // namespace

MWReport mw_x_series(const Model& m, const Index& j_max) {
  check_positive_index(j_max, "mw_x_series");
  if (j_max.dim() != m.dim()) {
    throw std::invalid_argument("mw_x_series: j_max dimension mismatch");
  }
  const int d = m.dim();
  const double sigma_sq = innovation_variance(m.innovations);

  MWReport rep;
  rep.series = "x-series";
  std::vector<double> terms;

  if (m.is_linear()) {
    const CoeffArray& c = m.linear();
    const Window ss = squared_suffix_sums(c);
    const Index top = c.support_extent - Index::ones(d);
    for_each_index(Index::ones(d), j_max, [&](const Index& j) {
      double norm_sq = 0.0;
      if (all_le(j, top)) norm_sq = sigma_sq * ss.at(j);
      const double t = std::sqrt(std::max(norm_sq, 0.0)) /
                       std::sqrt(static_cast<double>(product_norm(j)));
      rep.terms.push_back({j, t});
      terms.push_back(t);
    });
    rep.verdict = all_ge(j_max, top) ? Verdict::kFiniteByExactness : Verdict::kInconclusive;
  } else {
    if (m.innovations.structure != Structure::kIid) {
      throw std::invalid_argument("mw_x_series: bilinear closed form requires iid innovations");
    }
    const VolterraCoeffs& c = m.volterra();
    Index reach = Index::zeros(d);
    for (const auto& e : c.entries) reach = cwise_max(reach, cwise_min(e.u, e.v));
    for_each_index(Index::ones(d), j_max, [&](const Index& j) {
      double sum = 0.0;
      double scale = 0.0;
      for (const auto& e : c.entries) {
        if (all_ge(e.u, j) && all_ge(e.v, j)) {
          const double cross = e.value * c.lookup(e.v, e.u);
          sum += e.value * e.value + cross;
          scale += e.value * e.value + std::abs(cross);
        }
      }
      if (sum < 0.0) {
        if (sum < -1e-9 * std::max(scale, 1.0)) {
          throw std::runtime_error("mw_x_series: negative norm total " + std::to_string(sum));
        }
        sum = 0.0;
      }
      const double t = std::sqrt(sigma_sq * sigma_sq * sum) /
                       std::sqrt(static_cast<double>(product_norm(j)));
      rep.terms.push_back({j, t});
      terms.push_back(t);
    });
    rep.verdict = all_ge(j_max, reach) ? Verdict::kFiniteByExactness : Verdict::kInconclusive;
  }
  rep.partial_sum = pairwise_sum(terms);
  return rep;
}

std::vector<AbsSumRow> abs_sum_scan(const std::function<double(const Index&)>& a, int dim,
                                    const std::vector<std::int64_t>& radii) {
  if (radii.empty()) {
    throw std::invalid_argument("abs_sum_scan: empty radius list");
  }
  for (size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] < 0 || (i > 0 && radii[i] <= radii[i - 1])) {
      throw std::invalid_argument("abs_sum_scan: radii must be strictly increasing and >= 0");
    }
  }
  std::vector<AbsSumRow> rows;
  double prev = 0.0;
  for (std::int64_t r : radii) {
    std::vector<double> vals;
    for_each_index(Index::zeros(dim), Index::filled(dim, r),
                   [&](const Index& u) { vals.push_back(std::abs(a(u))); });
    const double partial = pairwise_sum(vals);
    rows.push_back({r, partial, partial - prev});
    prev = partial;
  }
  return rows;
}

}  // namespace rfclt
