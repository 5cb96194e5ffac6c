#pragma once

#include <vector>

namespace gradlab::quad {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rules are computed once per order by Newton iteration on P_n and cached;
/// the returned reference stays valid for the program lifetime.
const GaussRule& gauss_legendre(int order);

/// integral_a^b f with `panels` equal panels of an `order`-point rule.
template <class F>
double composite(F&& f, double a, double b, int panels, int order = 16) {
  const GaussRule& rule = gauss_legendre(order);
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    double s = 0.0;
    for (int q = 0; q < order; ++q) {
      s += rule.weights[q] * f(mid + 0.5 * width * rule.nodes[q]);
    }
    total += 0.5 * width * s;
  }
  return total;
}

}  // namespace gradlab::quad
