#include "gradlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace gradlab::kernels {

namespace {

// Laplacian of component k at node (r, c).
inline double lap(const GridShape& g, std::span<const double> u, int r, int c, int k) {
  const int m = g.m;
  const std::size_t at = (static_cast<std::size_t>(r) * g.cols + c) * m + k;
  const double mid = u[at];
  const std::size_t row = static_cast<std::size_t>(g.cols) * m;
  double s = (u[at - row] - 2.0 * mid + u[at + row]) / (g.h0 * g.h0);
  if (g.n == 2) s += (u[at - m] - 2.0 * mid + u[at + m]) / (g.h1 * g.h1);
  return s;
}

template <bool Parallel>
void sweep_impl(const GridShape& g, std::span<double> u, const Potential& p, double tau,
                int color) {
#pragma omp parallel if (Parallel)
  {
    std::vector<double> grad(g.m), lp(g.m);
#pragma omp for schedule(static)
    for (int r = 1; r < g.rows - 1; ++r) {
      const int c_lo = g.n == 2 ? 1 : 0;
      const int c_hi = g.n == 2 ? g.cols - 2 : 0;
      for (int c = c_lo; c <= c_hi; ++c) {
        if (((r + c) & 1) != color) continue;
        double* node = u.data() + (static_cast<std::size_t>(r) * g.cols + c) * g.m;
        for (int k = 0; k < g.m; ++k) lp[k] = lap(g, u, r, c, k);
        p.gradient(std::span<const double>(node, g.m), grad);
        for (int k = 0; k < g.m; ++k) node[k] += tau * (lp[k] - grad[k]);
      }
    }
  }
}

template <bool Parallel>
double residual_impl(const GridShape& g, std::span<const double> u, const Potential& p) {
  std::vector<double> row_max(g.rows, 0.0);
#pragma omp parallel if (Parallel)
  {
    std::vector<double> grad(g.m);
#pragma omp for schedule(static)
    for (int r = 1; r < g.rows - 1; ++r) {
      const int c_lo = g.n == 2 ? 1 : 0;
      const int c_hi = g.n == 2 ? g.cols - 2 : 0;
      double worst = 0.0;
      for (int c = c_lo; c <= c_hi; ++c) {
        const double* node = u.data() + (static_cast<std::size_t>(r) * g.cols + c) * g.m;
        p.gradient(std::span<const double>(node, g.m), grad);
        for (int k = 0; k < g.m; ++k) {
          const double d = std::abs(lap(g, u, r, c, k) - grad[k]);
          if (!(d <= worst)) worst = std::isnan(d) ? std::numeric_limits<double>::infinity() : d;
        }
      }
      row_max[r] = worst;
    }
  }
  double worst = 0.0;
  for (double v : row_max) worst = std::max(worst, v);
  return worst;
}

template <bool Parallel>
double energy_impl(const GridShape& g, std::span<const double> u, const Potential& p) {
  std::vector<double> row_sum(g.rows, 0.0);
  const int m = g.m;
  const double cell = g.n == 2 ? g.h0 * g.h1 : g.h0;
#pragma omp parallel for schedule(static) if (Parallel)
  for (int r = 0; r < g.rows; ++r) {
    const double wr = (r == 0 || r == g.rows - 1) ? 0.5 : 1.0;
    double s = 0.0;
    for (int c = 0; c < g.cols; ++c) {
      const double wc = (g.n == 2 && (c == 0 || c == g.cols - 1)) ? 0.5 : 1.0;
      const double* node = u.data() + (static_cast<std::size_t>(r) * g.cols + c) * m;
      s += wr * wc * cell * p.value(std::span<const double>(node, m));
      if (r + 1 < g.rows) {
        const double* below = node + static_cast<std::size_t>(g.cols) * m;
        double d2 = 0.0;
        for (int k = 0; k < m; ++k) d2 += (below[k] - node[k]) * (below[k] - node[k]);
        s += wc * cell * 0.5 * d2 / (g.h0 * g.h0);
      }
      if (g.n == 2 && c + 1 < g.cols) {
        const double* right = node + m;
        double d2 = 0.0;
        for (int k = 0; k < m; ++k) d2 += (right[k] - node[k]) * (right[k] - node[k]);
        s += wr * cell * 0.5 * d2 / (g.h1 * g.h1);
      }
    }
    row_sum[r] = s;
  }
  double total = 0.0;
  for (double v : row_sum) total += v;
  return total;
}

template <bool Parallel>
MinLocation min_margin_impl(std::size_t count, const std::function<double(std::size_t)>& margin) {
  std::vector<double> values(count);
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(static) if (Parallel)
  for (long long k = 0; k < n; ++k) {
    const double v = margin(static_cast<std::size_t>(k));
    values[k] = std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
  }
  MinLocation best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t k = 0; k < count; ++k) {
    if (values[k] < best.value) best = {values[k], k};
  }
  return best;
}

}  // namespace

namespace serial {
void sweep(const GridShape& g, std::span<double> u, const Potential& p, double tau, int color) {
  sweep_impl<false>(g, u, p, tau, color);
}
double residual(const GridShape& g, std::span<const double> u, const Potential& p) {
  return residual_impl<false>(g, u, p);
}
double energy(const GridShape& g, std::span<const double> u, const Potential& p) {
  return energy_impl<false>(g, u, p);
}
MinLocation min_margin(std::size_t count, const std::function<double(std::size_t)>& margin) {
  return min_margin_impl<false>(count, margin);
}
}  // namespace serial

namespace omp {
void sweep(const GridShape& g, std::span<double> u, const Potential& p, double tau, int color) {
  sweep_impl<true>(g, u, p, tau, color);
}
double residual(const GridShape& g, std::span<const double> u, const Potential& p) {
  return residual_impl<true>(g, u, p);
}
double energy(const GridShape& g, std::span<const double> u, const Potential& p) {
  return energy_impl<true>(g, u, p);
}
MinLocation min_margin(std::size_t count, const std::function<double(std::size_t)>& margin) {
  return min_margin_impl<true>(count, margin);
}
}  // namespace omp

}  // namespace gradlab::kernels
