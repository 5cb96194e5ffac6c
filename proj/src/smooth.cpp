#include "gradlab/smooth.hpp"

#include "gradlab/quadrature.hpp"

namespace gradlab::smooth {

Taylor3 operator+(const Taylor3& a, const Taylor3& b) {
  Taylor3 r;
  for (int i = 0; i < 4; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}

Taylor3 operator-(const Taylor3& a, const Taylor3& b) {
  Taylor3 r;
  for (int i = 0; i < 4; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}

Taylor3 operator*(double s, const Taylor3& a) {
  Taylor3 r;
  for (int i = 0; i < 4; ++i) r.d[i] = s * a.d[i];
  return r;
}

Taylor3 operator*(const Taylor3& a, const Taylor3& b) {
  // Leibniz rule
  Taylor3 r;
  r.d[0] = a.d[0] * b.d[0];
  r.d[1] = a.d[1] * b.d[0] + a.d[0] * b.d[1];
  r.d[2] = a.d[2] * b.d[0] + 2.0 * a.d[1] * b.d[1] + a.d[0] * b.d[2];
  r.d[3] = a.d[3] * b.d[0] + 3.0 * a.d[2] * b.d[1] + 3.0 * a.d[1] * b.d[2] +
           a.d[0] * b.d[3];
  return r;
}

Taylor3 compose(const Taylor3& f, const std::array<double, 4>& g) {
  const double f1 = f.d[1];
  const double f2 = f.d[2];
  const double f3 = f.d[3];
  Taylor3 r;
  r.d[0] = g[0];
  r.d[1] = g[1] * f1;
  r.d[2] = g[2] * f1 * f1 + g[1] * f2;
  r.d[3] = g[3] * f1 * f1 * f1 + 3.0 * g[2] * f1 * f2 + g[1] * f3;
  return r;
}

Taylor3 reciprocal(const Taylor3& a) {
  const double x = a.d[0];
  const double i1 = 1.0 / x;
  const double i2 = i1 * i1;
  return compose(a, {i1, -i2, 2.0 * i2 * i1, -6.0 * i2 * i2});
}

Taylor3 operator/(const Taylor3& a, const Taylor3& b) { return a * reciprocal(b); }

Taylor3 exp(const Taylor3& a) {
  const double e = std::exp(a.d[0]);
  return compose(a, {e, e, e, e});
}

namespace {

// exp(-p/t) for t > 0 with derivatives in t; zero (flat) once it underflows.
Taylor3 flat_exp(double t, double p) {
  if (t <= p / 700.0) return Taylor3::constant(0.0);
  const Taylor3 tt = Taylor3::variable(t);
  return exp(-p * reciprocal(tt));
}

}  // namespace

Taylor3 step(double t, double sharpness) {
  if (t <= 0.0) return Taylor3::constant(0.0);
  if (t >= 1.0) return Taylor3::constant(1.0);
  const Taylor3 f = flat_exp(t, sharpness);
  Taylor3 g = flat_exp(1.0 - t, sharpness);
  // g(t) = f(1 - t): odd derivatives flip sign
  g.d[1] = -g.d[1];
  g.d[3] = -g.d[3];
  return f / (f + g);
}

namespace {

double ramp_lower_half(double x, double p) {
  if (x <= 0.0) return 0.0;
  return quad::composite([p](double t) { return step(t, p).value(); }, 0.0, x,
                         16, 20);
}

}  // namespace

double ramp_integral(double x, double sharpness) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return x - 0.5;
  if (x <= 0.5) return ramp_lower_half(x, sharpness);
  // S(t) = 1 - S(1 - t) gives R(x) = x - 1/2 + R(1 - x)
  return x - 0.5 + ramp_lower_half(1.0 - x, sharpness);
}

}  // namespace gradlab::smooth
