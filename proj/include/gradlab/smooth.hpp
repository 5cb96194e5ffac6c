#pragma once

// C-infinity building blocks with flat (all derivatives zero) contact, and a
// small truncated Taylor arithmetic to get their derivatives in closed form.

#include <array>
#include <cmath>

namespace gradlab::smooth {

/// Derivatives d[0..3] of a scalar function at a point.
struct Taylor3 {
  std::array<double, 4> d{0.0, 0.0, 0.0, 0.0};

  static Taylor3 constant(double c) { return {{c, 0.0, 0.0, 0.0}}; }
  static Taylor3 variable(double x) { return {{x, 1.0, 0.0, 0.0}}; }

  double value() const { return d[0]; }
};

Taylor3 operator+(const Taylor3& a, const Taylor3& b);
Taylor3 operator-(const Taylor3& a, const Taylor3& b);
Taylor3 operator*(const Taylor3& a, const Taylor3& b);
Taylor3 operator*(double s, const Taylor3& a);
Taylor3 operator/(const Taylor3& a, const Taylor3& b);
Taylor3 exp(const Taylor3& a);
Taylor3 reciprocal(const Taylor3& a);

/// Compose an outer function (given by its derivatives g[0..3] at f.value())
/// with the inner jet f (Faa di Bruno to third order).
Taylor3 compose(const Taylor3& f, const std::array<double, 4>& g);

/// Flat smooth step: 0 for t <= 0, 1 for t >= 1, exp(-p/t) blend in between.
/// Satisfies S(1 - t) = 1 - S(t). Returned with three derivatives in t.
Taylor3 step(double t, double sharpness = 1.0);

/// R(x) = integral_0^x S(t) dt for x in [0, 1]; R(0) = 0, R(1) = 1/2 exactly.
/// Clamped: R(x) = 0 for x <= 0 and R(x) = x - 1/2 for x >= 1.
double ramp_integral(double x, double sharpness = 1.0);

}  // namespace gradlab::smooth
