#include "rfclt/exact_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "rfclt/field_sim.hpp"
#include "rfclt/stats.hpp"

namespace rfclt {

namespace {

bool lex_less(const Index& a, const Index& b) {
  for (int i = 0; i < a.dim(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

void sort_unique(std::vector<Index>& v) {
  std::sort(v.begin(), v.end(), lex_less);
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

int sign_bit(std::uint32_t config, int pos) {
  return (config >> pos) & 1u ? 1 : -1;
}

void check_rect(const ExactModel& em, const RectSpec& rect) {
  const Index win_hi = em.window_origin + em.window_extent - Index::ones(em.model.dim());
  if (rect.lo.dim() != em.model.dim() || rect.hi.dim() != em.model.dim()) {
    throw std::invalid_argument("oracle rect: dimension mismatch");
  }
  if (!all_le(rect.lo, rect.hi)) {
    throw std::invalid_argument("oracle rect: empty box " + rect.lo.str() + ".." +
                                rect.hi.str());
  }
  if (!all_ge(rect.lo, em.window_origin) || !all_le(rect.hi, win_hi)) {
    throw std::out_of_range("oracle rect " + rect.lo.str() + ".." + rect.hi.str() +
                            " outside window [" + em.window_origin.str() + ", " +
                            win_hi.str() + "]");
  }
}

// One statistic term per xi cell (linear) or cell pair (bilinear), with
// site positions resolved once. p_below = -1 marks iid cells whose value is
// the site sign itself.
struct LinTerm {
  int p_cell;
  int p_below;
  double w;
};

struct BilTerm {
  int a_cell, a_below;
  int b_cell, b_below;
  double c;
};

struct TermList {
  std::vector<LinTerm> lin;
  std::vector<BilTerm> bil;
};

int must_pos(const ExactModel& em, const Index& cell, const char* what) {
  const int p = em.site_pos(cell);
  if (p < 0) {
    throw std::logic_error(std::string(what) + ": cell " + cell.str() +
                           " not materialized");
  }
  return p;
}

TermList build_terms(const ExactModel& em, const RectSpec& rect) {
  check_rect(em, rect);
  TermList t;
  const int d = em.model.dim();
  Index below_shift = Index::zeros(d);
  below_shift[0] = 1;

  if (em.model.is_linear()) {
    const CoeffArray& c = em.model.linear();
    // w_cell = sum over support offsets j with cell + j inside the rect.
    std::vector<Index> cells;
    for_each_index(rect.lo, rect.hi, [&](const Index& k) {
      for_each_index(Index::zeros(d), c.support_extent - Index::ones(d), [&](const Index& j) {
        if (c.at(j) != 0.0) cells.push_back(k - j);
      });
    });
    sort_unique(cells);
    for (const Index& cell : cells) {
      double w = 0.0;
      for_each_index(Index::zeros(d), c.support_extent - Index::ones(d), [&](const Index& j) {
        const Index k = cell + j;
        if (c.at(j) != 0.0 && all_ge(k, rect.lo) && all_le(k, rect.hi)) w += c.at(j);
      });
      if (w == 0.0) continue;
      LinTerm lt;
      lt.p_cell = must_pos(em, cell, "build_terms");
      lt.p_below = em.mds ? must_pos(em, cell - below_shift, "build_terms") : -1;
      lt.w = w;
      t.lin.push_back(lt);
    }
  } else {
    const VolterraCoeffs& vc = em.model.volterra();
    // Combine duplicate (cellA, cellB) pairs so the per-site adjacency in
    // the Gray sweep stays small.
    std::vector<std::pair<std::pair<Index, Index>, double>> raw;
    for_each_index(rect.lo, rect.hi, [&](const Index& k) {
      for (const auto& e : vc.entries) {
        raw.push_back({{k - e.u, k - e.v}, e.value});
      }
    });
    std::sort(raw.begin(), raw.end(), [](const auto& x, const auto& y) {
      if (lex_less(x.first.first, y.first.first)) return true;
      if (lex_less(y.first.first, x.first.first)) return false;
      return lex_less(x.first.second, y.first.second);
    });
    for (size_t i = 0; i < raw.size();) {
      size_t jx = i;
      double c = 0.0;
      while (jx < raw.size() && raw[jx].first.first == raw[i].first.first &&
             raw[jx].first.second == raw[i].first.second) {
        c += raw[jx].second;
        ++jx;
      }
      if (c != 0.0) {
        BilTerm bt;
        bt.a_cell = must_pos(em, raw[i].first.first, "build_terms");
        bt.a_below =
            em.mds ? must_pos(em, raw[i].first.first - below_shift, "build_terms") : -1;
        bt.b_cell = must_pos(em, raw[i].first.second, "build_terms");
        bt.b_below =
            em.mds ? must_pos(em, raw[i].first.second - below_shift, "build_terms") : -1;
        bt.c = c;
        t.bil.push_back(bt);
      }
      i = jx;
    }
  }
  return t;
}

int cell_t(std::uint32_t config, int p_cell, int p_below) {
  const int s = sign_bit(config, p_cell);
  if (p_below < 0) return s;
  return sign_bit(config, p_below) > 0 ? s : 0;
}

double eval_term_list(const TermList& t, std::uint32_t config) {
  double s = 0.0;
  for (const auto& lt : t.lin) s += lt.w * cell_t(config, lt.p_cell, lt.p_below);
  for (const auto& bt : t.bil) {
    s += bt.c * cell_t(config, bt.a_cell, bt.a_below) *
         cell_t(config, bt.b_cell, bt.b_below);
  }
  return s;
}

}  // namespace

int ExactModel::site_pos(const Index& cell) const {
  auto it = std::lower_bound(sites.begin(), sites.end(), cell, lex_less);
  if (it == sites.end() || !(*it == cell)) return -1;
  return static_cast<int>(it - sites.begin());
}

ExactModel enumerate_model(const Model& m, const Index& extent, const Index& pad) {
  const int d = m.dim();
  if (extent.dim() != d || pad.dim() != d) {
    throw std::invalid_argument("enumerate_model: dimension mismatch");
  }
  if (!all_ge(extent, 1) || !all_ge(pad, 0)) {
    throw std::invalid_argument("enumerate_model: extent >= 1 and pad >= 0 required");
  }
  if (m.innovations.dist != Distribution::kRademacher) {
    throw std::invalid_argument("enumerate_model: enumeration requires Rademacher innovations");
  }
  const Index req = required_pad(m);
  if (!all_ge(pad, req)) {
    const Index origin = Index::ones(d);
    throw std::invalid_argument("enumerate_model: pad " + pad.str() +
                                " misses sites in [" + (origin - req).str() + ", " +
                                (origin - pad).str() + "); required pad " + req.str());
  }

  ExactModel em;
  em.model = m;
  em.window_origin = Index::ones(d);
  em.window_extent = extent;
  em.xi_lo = em.window_origin - pad;
  em.xi_hi = extent;  // origin + extent - 1 with origin = ones
  em.degree = m.is_linear() ? 1 : 2;
  em.mds = m.innovations.structure == Structure::kColumnMds;

  if (em.mds) {
    if (d != 2) {
      throw std::invalid_argument("enumerate_model: column-mds structure requires d = 2");
    }
    em.unit = std::sqrt(2.0);
    // One extra base row below the xi region feeds the gate factor.
    em.base_lo = em.xi_lo;
    em.base_lo[0] -= 1;
    em.base_hi = em.xi_hi;
    for_each_index(em.base_lo, em.base_hi, [&](const Index& s) { em.sites.push_back(s); });
  } else {
    em.unit = 1.0;
    em.base_lo = em.xi_lo;
    em.base_hi = em.xi_hi;
    // Keep only sites some window cell actually reads.
    std::vector<Index> used;
    const Index win_hi = em.window_origin + extent - Index::ones(d);
    if (m.is_linear()) {
      const CoeffArray& c = m.linear();
      for_each_index(em.window_origin, win_hi, [&](const Index& k) {
        for_each_index(Index::zeros(d), c.support_extent - Index::ones(d),
                       [&](const Index& j) {
                         if (c.at(j) != 0.0) used.push_back(k - j);
                       });
      });
    } else {
      for_each_index(em.window_origin, win_hi, [&](const Index& k) {
        for (const auto& e : m.volterra().entries) {
          used.push_back(k - e.u);
          used.push_back(k - e.v);
        }
      });
    }
    sort_unique(used);
    em.sites = std::move(used);
  }

  if (em.n_sites() > kOracleMaxSites) {
    throw std::invalid_argument("enumerate_model: " + std::to_string(em.n_sites()) +
                                " sites exceed the cap of " +
                                std::to_string(kOracleMaxSites));
  }
  return em;
}

int xi_t_value(const ExactModel& em, const Index& cell, std::uint32_t config) {
  if (!all_ge(cell, em.xi_lo) || !all_le(cell, em.xi_hi)) {
    throw std::out_of_range("xi_t_value: cell " + cell.str() + " outside xi region");
  }
  const int p = em.site_pos(cell);
  if (p < 0) {
    throw std::out_of_range("xi_t_value: cell " + cell.str() + " pruned");
  }
  if (!em.mds) return sign_bit(config, p);
  Index below = cell;
  below[0] -= 1;
  return cell_t(config, p, em.site_pos(below));
}

std::vector<double> enumerate_statistic(const ExactModel& em, const RectSpec& rect) {
  if (em.n_sites() > kOracleDenseSites) {
    throw std::invalid_argument("enumerate_statistic: dense path capped at " +
                                std::to_string(kOracleDenseSites) + " sites");
  }
  const TermList terms = build_terms(em, rect);
  const std::uint64_t total = std::uint64_t(1) << em.n_sites();
  std::vector<double> out(static_cast<size_t>(total));
  for (std::uint64_t cfg = 0; cfg < total; ++cfg) {
    out[static_cast<size_t>(cfg)] = eval_term_list(terms, static_cast<std::uint32_t>(cfg));
  }
  return out;
}

namespace {

std::vector<double> condition_values_impl(const ExactModel& em,
                                          const std::vector<double>& values,
                                          const Index& corner,
                                          std::int64_t* classes_out) {
  const std::uint64_t total = std::uint64_t(1) << em.n_sites();
  if (values.size() != total) {
    throw std::invalid_argument("condition_values: wrong table size");
  }
  if (corner.dim() != em.model.dim()) {
    throw std::invalid_argument("condition_values: corner dimension mismatch");
  }

  if (!em.mds) {
    std::uint32_t mask = 0;
    for (int p = 0; p < em.n_sites(); ++p) {
      if (all_le(em.sites[static_cast<size_t>(p)], corner)) mask |= (1u << p);
    }
    std::unordered_map<std::uint32_t, std::pair<long double, std::int64_t>> acc;
    for (std::uint64_t cfg = 0; cfg < total; ++cfg) {
      auto& slot = acc[static_cast<std::uint32_t>(cfg) & mask];
      slot.first += values[static_cast<size_t>(cfg)];
      slot.second += 1;
    }
    std::vector<double> out(values.size());
    for (std::uint64_t cfg = 0; cfg < total; ++cfg) {
      const auto& slot = acc[static_cast<std::uint32_t>(cfg) & mask];
      out[static_cast<size_t>(cfg)] =
          static_cast<double>(slot.first / static_cast<long double>(slot.second));
    }
    if (classes_out) *classes_out = static_cast<std::int64_t>(acc.size());
    return out;
  }

  // Column-MDS: the cone is generated by the derived xi values, not the base
  // signs. Key = packed ternary xi values over cone cells.
  std::vector<Index> cone;
  for_each_index(em.xi_lo, cwise_min(em.xi_hi, corner), [&](const Index& cell) {
    if (all_le(cell, corner)) cone.push_back(cell);
  });
  if (cone.size() > 31) {
    throw std::invalid_argument("condition_values: cone too large to pack");
  }
  std::vector<std::pair<int, int>> cone_pos;
  cone_pos.reserve(cone.size());
  for (const Index& cell : cone) {
    Index below = cell;
    below[0] -= 1;
    cone_pos.push_back({must_pos(em, cell, "condition_values"),
                        must_pos(em, below, "condition_values")});
  }
  std::vector<std::uint64_t> keys(static_cast<size_t>(total));
  std::unordered_map<std::uint64_t, std::pair<long double, std::int64_t>> acc;
  for (std::uint64_t cfg = 0; cfg < total; ++cfg) {
    std::uint64_t key = 0;
    for (const auto& [pc, pb] : cone_pos) {
      key = (key << 2) | static_cast<std::uint64_t>(
                             cell_t(static_cast<std::uint32_t>(cfg), pc, pb) + 1);
    }
    keys[static_cast<size_t>(cfg)] = key;
    auto& slot = acc[key];
    slot.first += values[static_cast<size_t>(cfg)];
    slot.second += 1;
  }
  std::vector<double> out(values.size());
  for (std::uint64_t cfg = 0; cfg < total; ++cfg) {
    const auto& slot = acc[keys[static_cast<size_t>(cfg)]];
    out[static_cast<size_t>(cfg)] =
        static_cast<double>(slot.first / static_cast<long double>(slot.second));
  }
  if (classes_out) *classes_out = static_cast<std::int64_t>(acc.size());
  return out;
}

}  // namespace

std::vector<double> condition_values(const ExactModel& em, const std::vector<double>& values,
                                     const Index& corner) {
  return condition_values_impl(em, values, corner, nullptr);
}

double CondExpectation::value_at(std::uint32_t config) const {
  if (!dense.empty()) return dense[config];
  auto it = class_mean.find(config & cond_mask);
  if (it == class_mean.end()) {
    throw std::out_of_range("CondExpectation::value_at: unknown class");
  }
  return it->second;
}

CondExpectation exact_cond_expectation(const ExactModel& em, const RectSpec& rect,
                                       const Index& cond) {
  if (cond.dim() != em.model.dim()) {
    throw std::invalid_argument("exact_cond_expectation: corner dimension mismatch");
  }
  const double scale = std::pow(em.unit, em.degree);
  CondExpectation r;

  if (em.mds) {
    // Small-N dense route; class structure keyed by derived xi values.
    std::vector<double> vals = enumerate_statistic(em, rect);
    std::vector<double> cm = condition_values_impl(em, vals, cond, &r.classes);
    const double n = static_cast<double>(cm.size());
    long double sum = 0.0L, sq = 0.0L;
    for (double v : cm) {
      sum += v;
      sq += static_cast<long double>(v) * v;
    }
    r.dense.resize(cm.size());
    for (size_t i = 0; i < cm.size(); ++i) r.dense[i] = cm[i] * scale;
    r.grand_mean = static_cast<double>(sum / n) * scale;
    r.l2 = std::sqrt(static_cast<double>(sq / n)) * scale;
    return r;
  }

  // iid fast route: stream all configurations in Gray order with the free
  // sites in the low counter bits, so each aligned run of 2^F configurations
  // is exactly one conditioning class.
  const TermList terms = build_terms(em, rect);
  const int n = em.n_sites();
  std::uint32_t mask = 0;
  std::vector<int> perm;  // counter position -> site position, free first
  for (int p = 0; p < n; ++p) {
    if (all_le(em.sites[static_cast<size_t>(p)], cond)) {
      mask |= (1u << p);
    } else {
      perm.push_back(p);
    }
  }
  const int n_free = static_cast<int>(perm.size());
  for (int p = 0; p < n; ++p) {
    if (mask & (1u << p)) perm.push_back(p);
  }

  // Per-site statistic derivatives for O(1) flip updates.
  std::vector<double> lin_w(static_cast<size_t>(n), 0.0);
  for (const auto& lt : terms.lin) lin_w[static_cast<size_t>(lt.p_cell)] += lt.w;
  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<size_t>(n));
  for (const auto& bt : terms.bil) {
    adj[static_cast<size_t>(bt.a_cell)].push_back({bt.b_cell, bt.c});
    adj[static_cast<size_t>(bt.b_cell)].push_back({bt.a_cell, bt.c});
  }

  std::uint32_t config = 0;  // all signs -1
  double s = 0.0;
  for (int p = 0; p < n; ++p) s -= lin_w[static_cast<size_t>(p)];
  for (const auto& bt : terms.bil) s += bt.c;

  const std::uint64_t total = std::uint64_t(1) << n;
  const std::uint64_t block = std::uint64_t(1) << n_free;
  const double inv_block = 1.0 / static_cast<double>(block);
  const double class_prob =
      1.0 / static_cast<double>(std::uint64_t(1) << (n - n_free));

  long double norm2 = 0.0L, grand = 0.0L;
  double class_sum = 0.0;
  for (std::uint64_t g = 0; g < total; ++g) {
    class_sum += s;
    if (((g + 1) & (block - 1)) == 0) {
      const double mean = class_sum * inv_block;
      r.class_mean[config & mask] = mean * scale;
      norm2 += static_cast<long double>(mean) * mean;
      grand += mean;
      class_sum = 0.0;
    }
    if (g + 1 < total) {
      const int p = perm[static_cast<size_t>(std::countr_zero(g + 1))];
      config ^= (1u << p);
      const int s_new = sign_bit(config, p);
      s += 2.0 * s_new * lin_w[static_cast<size_t>(p)];
      double cross = 0.0;
      for (const auto& [o, c] : adj[static_cast<size_t>(p)]) {
        cross += c * sign_bit(config, o);
      }
      s += 2.0 * s_new * cross;
    }
  }
  r.cond_mask = mask;
  r.classes = static_cast<std::int64_t>(r.class_mean.size());
  r.l2 = std::sqrt(static_cast<double>(norm2) * class_prob) * scale;
  r.grand_mean = static_cast<double>(grand) * class_prob * scale;
  return r;
}

double check_commuting(const ExactModel& em, const RectSpec& rect, const Index& hi_corner,
                       const Index& lo_corner) {
  if (em.model.dim() != 2) {
    throw std::invalid_argument("check_commuting: d = 2 required");
  }
  if (hi_corner.dim() != 2 || lo_corner.dim() != 2) {
    throw std::invalid_argument("check_commuting: corner dimension mismatch");
  }
  if (hi_corner[0] < lo_corner[0]) {
    throw std::invalid_argument("check_commuting: requires hi_corner[0] >= lo_corner[0]");
  }
  const std::vector<double> vals = enumerate_statistic(em, rect);
  const std::vector<double> v1 = condition_values(em, vals, hi_corner);
  const std::vector<double> v2 = condition_values(em, v1, lo_corner);
  const Index mix{lo_corner[0], std::min(hi_corner[1], lo_corner[1])};
  const std::vector<double> v3 = condition_values(em, vals, mix);
  double dev = 0.0;
  for (size_t i = 0; i < v2.size(); ++i) {
    dev = std::max(dev, std::abs(v2[i] - v3[i]));
  }
  return dev * std::pow(em.unit, em.degree);
}

namespace {

double second_moment(const ExactModel& em, const RectSpec& rect) {
  const TermList terms = build_terms(em, rect);
  const int n = em.n_sites();
  if (em.mds) {
    const std::vector<double> vals = enumerate_statistic(em, rect);
    long double sq = 0.0L;
    for (double v : vals) sq += static_cast<long double>(v) * v;
    return static_cast<double>(sq / static_cast<long double>(vals.size())) *
           std::pow(em.unit, 2 * em.degree);
  }
  std::vector<double> lin_w(static_cast<size_t>(n), 0.0);
  for (const auto& lt : terms.lin) lin_w[static_cast<size_t>(lt.p_cell)] += lt.w;
  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<size_t>(n));
  for (const auto& bt : terms.bil) {
    adj[static_cast<size_t>(bt.a_cell)].push_back({bt.b_cell, bt.c});
    adj[static_cast<size_t>(bt.b_cell)].push_back({bt.a_cell, bt.c});
  }
  std::uint32_t config = 0;
  double s = 0.0;
  for (int p = 0; p < n; ++p) s -= lin_w[static_cast<size_t>(p)];
  for (const auto& bt : terms.bil) s += bt.c;
  const std::uint64_t total = std::uint64_t(1) << n;
  long double sq = 0.0L;
  for (std::uint64_t g = 0; g < total; ++g) {
    sq += static_cast<long double>(s) * s;
    if (g + 1 < total) {
      const int p = static_cast<int>(std::countr_zero(g + 1));
      config ^= (1u << p);
      const int s_new = sign_bit(config, p);
      s += 2.0 * s_new * lin_w[static_cast<size_t>(p)];
      double cross = 0.0;
      for (const auto& [o, c] : adj[static_cast<size_t>(p)]) {
        cross += c * sign_bit(config, o);
      }
      s += 2.0 * s_new * cross;
    }
  }
  return static_cast<double>(sq / static_cast<long double>(total)) *
         std::pow(em.unit, 2 * em.degree);
}

}  // namespace

VarRatioReport exact_var_ratio(const Model& m, const Index& n, const Index& j_cap) {
  const int d = m.dim();
  if (n.dim() != d || j_cap.dim() != d) {
    throw std::invalid_argument("exact_var_ratio: dimension mismatch");
  }
  if (!all_ge(n, 1) || !all_ge(j_cap, 1)) {
    throw std::invalid_argument("exact_var_ratio: n and j_cap must be >= 1 per axis");
  }
  const Index pad = required_pad(m);

  VarRatioReport rep;
  {
    const ExactModel em = enumerate_model(m, n, pad);
    const RectSpec rect{Index::ones(d), n};
    rep.lhs = std::sqrt(second_moment(em, rect) / static_cast<double>(product_norm(n)));
  }

  std::vector<double> f1_terms, f0_terms;
  for_each_index(Index::ones(d), j_cap, [&](const Index& j) {
    ExactModel em;
    try {
      em = enumerate_model(m, j, pad);
    } catch (const std::invalid_argument&) {
      ++rep.skipped_terms;
      return;
    }
    const RectSpec rect{Index::ones(d), j};
    const double w = 1.0 / (static_cast<double>(product_norm(j)) *
                            std::sqrt(static_cast<double>(product_norm(j))));
    f1_terms.push_back(w * exact_cond_expectation(em, rect, Index::ones(d)).l2);
    f0_terms.push_back(w * exact_cond_expectation(em, rect, Index::zeros(d)).l2);
  });
  rep.rhs_f1 = pairwise_sum(f1_terms);
  rep.rhs_f0 = pairwise_sum(f0_terms);
  if (rep.rhs_f1 > 0.0) {
    rep.implied_constant = rep.lhs / rep.rhs_f1;
  } else {
    rep.degenerate = true;
  }
  return rep;
}

}  // namespace rfclt
