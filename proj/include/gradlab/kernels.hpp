#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "gradlab/potentials.hpp"

namespace gradlab::kernels {

/// Shape of a nodal grid with n = 1 or 2 axes; for n = 1, `cols` is 1.
/// Node (r, c) holds m reals at offset (r * cols + c) * m.
struct GridShape {
  int n = 2;
  int m = 1;
  int rows = 0;
  int cols = 1;
  double h0 = 1.0;
  double h1 = 1.0;

  std::size_t nodes() const { return static_cast<std::size_t>(rows) * cols; }
  bool interior(int r, int c) const {
    if (r < 1 || r > rows - 2) return false;
    return n == 1 || (c >= 1 && c <= cols - 2);
  }
};

struct MinLocation {
  double value;
  std::size_t index;  // smallest index attaining the minimum
};

// The serial and OpenMP variants compute bitwise identical results: sweeps
// touch independent nodes of one color, maxima are order-free, and sums are
// accumulated per row and then added in row order.

namespace serial {
/// u <- u + tau (Lap_h u - grad W(u)) on the interior nodes of one color.
void sweep(const GridShape& g, std::span<double> u, const Potential& p, double tau, int color);
/// sup over interior nodes and components of |Lap_h u - grad W(u)|.
double residual(const GridShape& g, std::span<const double> u, const Potential& p);
/// Trapezoid W plus edge terms 1/2 |du/h|^2, boundary edges at half weight.
double energy(const GridShape& g, std::span<const double> u, const Potential& p);
MinLocation min_margin(std::size_t count, const std::function<double(std::size_t)>& margin);
}  // namespace serial

namespace omp {
void sweep(const GridShape& g, std::span<double> u, const Potential& p, double tau, int color);
double residual(const GridShape& g, std::span<const double> u, const Potential& p);
double energy(const GridShape& g, std::span<const double> u, const Potential& p);
MinLocation min_margin(std::size_t count, const std::function<double(std::size_t)>& margin);
}  // namespace omp

}  // namespace gradlab::kernels
