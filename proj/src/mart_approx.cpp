#include "rfclt/mart_approx.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rfclt/parallel.hpp"
#include "rfclt/stats.hpp"

namespace rfclt {

Window block_sums(const Window& field, std::int64_t ell) {
  const int d = field.dim();
  if (d < 1) throw std::invalid_argument("block_sums: empty window");
  if (ell < 1) throw std::invalid_argument("block_sums: ell >= 1 required");
  const std::int64_t n_last = field.extent[d - 1];
  if (ell > n_last) {
    throw std::invalid_argument("block_sums: ell = " + std::to_string(ell) +
                                " exceeds blocking-axis extent " +
                                std::to_string(n_last));
  }
  const std::int64_t k = n_last / ell;
  Index out_origin = field.origin;
  out_origin[d - 1] = 1;
  Index out_extent = field.extent;
  out_extent[d - 1] = k;
  Window out(out_origin, out_extent);

  const double scale = 1.0 / std::sqrt(static_cast<double>(ell));
  for_each_index(out_origin, out.hi(), [&](const Index& b) {
    const std::int64_t i = b[d - 1];
    Index cell = b;
    double s = 0.0;
    for (std::int64_t t = 0; t < ell; ++t) {
      cell[d - 1] = field.origin[d - 1] + (i - 1) * ell + t;
      s += field.at(cell);
    }
    out.at(b) = s * scale;
  });
  return out;
}

BlockDecomposition mds_project_linear(const CoeffArray& c, const InnovationArray& xi,
                                      std::int64_t ell, const Index& extent) {
  if (c.support_extent.dim() != 2 || extent.dim() != 2) {
    throw std::invalid_argument("mds_project_linear: d = 2 required");
  }
  if (ell < 1) throw std::invalid_argument("mds_project_linear: ell >= 1 required");
  if (extent[1] < ell) {
    throw std::invalid_argument("mds_project_linear: ell = " + std::to_string(ell) +
                                " exceeds blocking-axis extent " +
                                std::to_string(extent[1]));
  }
  const std::int64_t n1 = extent[0];
  const std::int64_t k = extent[1] / ell;
  const Index s = c.support_extent;

  const Window field = simulate_linear(c, xi, extent, Index::ones(2));

  BlockDecomposition dec;
  dec.ell = ell;
  dec.x_blocks = block_sums(field, ell);
  dec.cond = Window(dec.x_blocks.origin, dec.x_blocks.extent);

  // Within block i only the first min(ell, s2 - 1) positions can reach an
  // innovation at or before the block boundary (i-1)*ell.
  const double scale = 1.0 / std::sqrt(static_cast<double>(ell));
  const std::int64_t t_max = std::min<std::int64_t>(ell, s[1] - 1);
  for (std::int64_t j = 1; j <= n1; ++j) {
    for (std::int64_t i = 1; i <= k; ++i) {
      const std::int64_t boundary = (i - 1) * ell;
      double acc = 0.0;
      for (std::int64_t t = 1; t <= t_max; ++t) {
        const std::int64_t u = boundary + t;
        for (std::int64_t w1 = 0; w1 < s[0]; ++w1) {
          for (std::int64_t w2 = t; w2 < s[1]; ++w2) {
            const double a = c.at(Index{w1, w2});
            if (a != 0.0) acc += a * xi.at(Index{j - w1, u - w2});
          }
        }
      }
      dec.cond.at(Index{j, i}) = acc * scale;
    }
  }

  dec.y_blocks = Window(dec.x_blocks.origin, dec.x_blocks.extent);
  for (size_t p = 0; p < dec.y_blocks.values.size(); ++p) {
    dec.y_blocks.values[p] = dec.x_blocks.values[p] - dec.cond.values[p];
  }
  dec.d_row = column_mds_sums(dec, n1);
  return dec;
}

BlockDecomposition decompose(const Model& m, std::int64_t ell, const Index& extent,
                             std::uint64_t rep_seed) {
  if (!m.is_linear()) {
    throw std::invalid_argument(
        "decompose: martingale decomposition supports linear models only");
  }
  InnovationSpec spec = m.innovations;
  spec.seed = rep_seed;
  const InnovationArray xi = gen_innovations(spec, extent, required_pad(m));
  return mds_project_linear(m.linear(), xi, ell, extent);
}

std::vector<double> column_mds_sums(const BlockDecomposition& dec, std::int64_t n1) {
  const Window& y = dec.y_blocks;
  if (y.dim() != 2) {
    throw std::invalid_argument("column_mds_sums: d = 2 decomposition required");
  }
  if (n1 < 1 || n1 > y.extent[0]) {
    throw std::invalid_argument("column_mds_sums: n1 = " + std::to_string(n1) +
                                " outside [1, " + std::to_string(y.extent[0]) + "]");
  }
  const std::int64_t k = y.extent[1];
  const double scale = 1.0 / std::sqrt(static_cast<double>(n1));
  std::vector<double> out(static_cast<size_t>(k));
  std::vector<double> col(static_cast<size_t>(n1));
  for (std::int64_t i = 1; i <= k; ++i) {
    for (std::int64_t j = 1; j <= n1; ++j) {
      col[static_cast<size_t>(j - 1)] = y.at(Index{j, i});
    }
    out[static_cast<size_t>(i - 1)] = pairwise_sum(col) * scale;
  }
  return out;
}

McLeishReport mcleish_diagnostics(const Model& m, std::int64_t ell, std::int64_t n1,
                                  std::int64_t k, std::int64_t reps, std::uint64_t seed,
                                  int threads) {
  if (n1 < 1 || k < 1) {
    throw std::invalid_argument("mcleish_diagnostics: n1 >= 1 and k >= 1 required");
  }
  if (reps < 2) throw std::invalid_argument("mcleish_diagnostics: reps >= 2 required");
  const Index extent{n1, k * ell};

  const auto stats = run_replications<std::array<double, 2>>(
      reps, seed, threads, [&](std::int64_t, std::uint64_t rep_seed) {
        const BlockDecomposition dec = decompose(m, ell, extent, rep_seed);
        std::vector<double> sq(dec.d_row.size());
        double mx = 0.0;
        for (size_t i = 0; i < dec.d_row.size(); ++i) {
          sq[i] = dec.d_row[i] * dec.d_row[i];
          mx = std::max(mx, sq[i]);
        }
        const double mean_sq = pairwise_sum(sq) / static_cast<double>(sq.size());
        return std::array<double, 2>{mx, mean_sq};
      });

  std::vector<double> max_sq(stats.size()), mean_sq(stats.size());
  for (size_t i = 0; i < stats.size(); ++i) {
    max_sq[i] = stats[i][0];
    mean_sq[i] = stats[i][1];
  }
  const Summary s_max = summarize(max_sq);
  const Summary s_sq = summarize(mean_sq);

  McLeishReport rep;
  rep.max_over_sqrt_n = s_max.mean / static_cast<double>(k);
  rep.max_over_kn = s_max.mean / (static_cast<double>(k) * static_cast<double>(n1));
  rep.max_se = s_max.se / static_cast<double>(k);
  rep.sum_sq_over_n = s_sq.mean;
  rep.sum_sq_se = s_sq.se;
  rep.c_sq_hat = s_sq.mean;
  rep.replications = reps;
  return rep;
}

SigmaEllEstimate sigma_ell_estimate(const Model& m, std::int64_t ell,
                                    const std::vector<std::int64_t>& n1_grid,
                                    std::int64_t reps, std::uint64_t seed, int threads) {
  if (n1_grid.empty()) {
    throw std::invalid_argument("sigma_ell_estimate: empty n1 grid");
  }
  for (size_t i = 0; i < n1_grid.size(); ++i) {
    if (n1_grid[i] < 1 || (i > 0 && n1_grid[i] <= n1_grid[i - 1])) {
      throw std::invalid_argument("sigma_ell_estimate: grid must be strictly increasing");
    }
  }
  if (reps < 2) throw std::invalid_argument("sigma_ell_estimate: reps >= 2 required");

  SigmaEllEstimate est;
  est.ell = ell;
  for (const std::int64_t n1 : n1_grid) {
    const Index extent{n1, ell};
    const auto d_sq = run_replications<double>(
        reps, seed, threads, [&](std::int64_t, std::uint64_t rep_seed) {
          const BlockDecomposition dec = decompose(m, ell, extent, rep_seed);
          return dec.d_row[0] * dec.d_row[0];
        });
    const Summary s = summarize(d_sq);
    est.rows.push_back({n1, s.mean, s.se});
  }
  est.sigma_sq = est.rows.back().sigma_sq;
  est.se = est.rows.back().se;
  return est;
}

std::vector<CauchyRow> sigma_cauchy_scan(const Model& m, const std::vector<std::int64_t>& ells,
                                         std::int64_t n1, std::int64_t reps,
                                         std::uint64_t seed, int threads) {
  if (ells.size() < 2) {
    throw std::invalid_argument("sigma_cauchy_scan: at least two ell values required");
  }
  for (size_t i = 0; i < ells.size(); ++i) {
    if (ells[i] < 1 || (i > 0 && ells[i] <= ells[i - 1])) {
      throw std::invalid_argument("sigma_cauchy_scan: ells must be strictly increasing");
    }
  }
  if (n1 < 1) throw std::invalid_argument("sigma_cauchy_scan: n1 >= 1 required");
  if (reps < 2) throw std::invalid_argument("sigma_cauchy_scan: reps >= 2 required");
  if (!m.is_linear()) {
    throw std::invalid_argument(
        "sigma_cauchy_scan: martingale decomposition supports linear models only");
  }

  const std::int64_t max_ell = ells.back();
  const Index pad = required_pad(m);
  const Index window_extent{n1, max_ell};

  // One innovation window per replication shared by every ell, so each
  // increment below is a paired difference.
  const auto d_sq = run_replications<std::vector<double>>(
      reps, seed, threads, [&](std::int64_t, std::uint64_t rep_seed) {
        InnovationSpec spec = m.innovations;
        spec.seed = rep_seed;
        const InnovationArray xi = gen_innovations(spec, window_extent, pad);
        std::vector<double> out(ells.size());
        for (size_t t = 0; t < ells.size(); ++t) {
          const BlockDecomposition dec =
              mds_project_linear(m.linear(), xi, ells[t], Index{n1, ells[t]});
          out[t] = dec.d_row[0] * dec.d_row[0];
        }
        return out;
      });

  std::vector<CauchyRow> rows;
  std::vector<double> a(d_sq.size()), b(d_sq.size()), diff(d_sq.size());
  for (size_t t = 0; t + 1 < ells.size(); ++t) {
    for (size_t r = 0; r < d_sq.size(); ++r) {
      a[r] = d_sq[r][t];
      b[r] = d_sq[r][t + 1];
      diff[r] = b[r] - a[r];
    }
    const Summary sd = summarize(diff);
    CauchyRow row;
    row.ell_from = ells[t];
    row.ell_to = ells[t + 1];
    row.sigma_sq_from = summarize(a).mean;
    row.sigma_sq_to = summarize(b).mean;
    row.increment = sd.mean;
    row.se = sd.se;
    rows.push_back(row);
  }
  return rows;
}

std::vector<ResidualRow> residual_scan(const Model& m, const Index& extent,
                                       const std::vector<std::int64_t>& ells,
                                       std::int64_t reps, std::uint64_t seed, int threads) {
  if (extent.dim() != 2) throw std::invalid_argument("residual_scan: d = 2 required");
  if (ells.empty()) throw std::invalid_argument("residual_scan: empty ell list");
  for (size_t i = 0; i < ells.size(); ++i) {
    if (ells[i] < 1 || ells[i] > extent[1] ||
        (i > 0 && ells[i] <= ells[i - 1])) {
      throw std::invalid_argument(
          "residual_scan: ells must be strictly increasing within the blocking axis");
    }
  }
  if (reps < 2) throw std::invalid_argument("residual_scan: reps >= 2 required");
  if (!m.is_linear()) {
    throw std::invalid_argument(
        "residual_scan: martingale decomposition supports linear models only");
  }

  const Index pad = required_pad(m);
  const double inv_sqrt_n =
      1.0 / std::sqrt(static_cast<double>(product_norm(extent)));

  const auto t_sq = run_replications<std::vector<double>>(
      reps, seed, threads, [&](std::int64_t, std::uint64_t rep_seed) {
        InnovationSpec spec = m.innovations;
        spec.seed = rep_seed;
        const InnovationArray xi = gen_innovations(spec, extent, pad);
        const Window field = simulate_linear(m.linear(), xi, extent, Index::ones(2));
        const double s_norm = pairwise_sum(field.values) * inv_sqrt_n;
        std::vector<double> out(ells.size());
        for (size_t t = 0; t < ells.size(); ++t) {
          const BlockDecomposition dec =
              mds_project_linear(m.linear(), xi, ells[t], extent);
          const double d_sum = pairwise_sum(dec.d_row) /
                               std::sqrt(static_cast<double>(dec.d_row.size()));
          const double r = s_norm - d_sum;
          out[t] = r * r;
        }
        return out;
      });

  std::vector<ResidualRow> rows;
  std::vector<double> col(t_sq.size());
  for (size_t t = 0; t < ells.size(); ++t) {
    for (size_t r = 0; r < t_sq.size(); ++r) col[r] = t_sq[r][t];
    const Summary s = summarize(col);
    ResidualRow row;
    row.ell = ells[t];
    row.residual = std::sqrt(std::max(0.0, s.mean));
    row.se = row.residual > 0.0 ? s.se / (2.0 * row.residual) : s.se;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rfclt
