#pragma once

#include <functional>
#include <span>
#include <vector>

namespace gradlab {

/// Value, first and second derivatives of a map u: R^n -> R^m at one point.
///
/// Storage is flat: du(j, i) = du_j/dx_i, d2u(j, i, k) = d^2 u_j / dx_i dx_k.
struct Jet2 {
  int n = 0;
  int m = 0;
  std::vector<double> x;
  std::vector<double> u;
  std::vector<double> du;
  std::vector<double> d2u;

  Jet2() = default;
  Jet2(int n_, int m_)
      : n(n_), m(m_), x(n_, 0.0), u(m_, 0.0), du(m_ * n_, 0.0),
        d2u(m_ * n_ * n_, 0.0) {}

  double& Du(int j, int i) { return du[j * n + i]; }
  double Du(int j, int i) const { return du[j * n + i]; }
  double& D2u(int j, int i, int k) { return d2u[(j * n + i) * n + k]; }
  double D2u(int j, int i, int k) const { return d2u[(j * n + i) * n + k]; }

  /// |grad u|^2 = sum_{j,i} Du(j,i)^2
  double grad_sq() const {
    double s = 0.0;
    for (double v : du) s += v * v;
    return s;
  }

  /// u_{x_i} . u_{x_k}
  double col_dot(int i, int k) const {
    double s = 0.0;
    for (int j = 0; j < m; ++j) s += Du(j, i) * Du(j, k);
    return s;
  }

  /// Laplacian of component j.
  double laplacian(int j) const {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += D2u(j, i, i);
    return s;
  }

  double value_sq() const {
    double s = 0.0;
    for (double v : u) s += v * v;
    return s;
  }

  /// sum_{j,i,k} (u^j_{x_i x_k})^2
  double hessian_sq() const {
    double s = 0.0;
    for (double v : d2u) s += v * v;
    return s;
  }
};

/// Anything that can produce a 2-jet at a point: closed-form fields, grids
/// (at nodes), assembled orbits.
using JetSource = std::function<Jet2(std::span<const double>)>;

}  // namespace gradlab
