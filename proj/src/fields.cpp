#include "gradlab/fields.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace gradlab {

using nlohmann::json;

ClosedFormField::ClosedFormField(std::string name, json params, int n, int m,
                                 Evaluator eval)
    : name_(std::move(name)), params_(std::move(params)), n_(n), m_(m),
      eval_(std::move(eval)) {}

Jet2 ClosedFormField::jet(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) {
    throw FieldError("jet: point has dimension " + std::to_string(x.size()) +
                     ", field '" + name_ + "' expects " + std::to_string(n_));
  }
  Jet2 j(n_, m_);
  j.x.assign(x.begin(), x.end());
  eval_(x, j);
  return j;
}

std::vector<double> ClosedFormField::value(std::span<const double> x) const {
  return jet(x).u;
}

JetSource ClosedFormField::source() const {
  return [f = *this](std::span<const double> x) { return f.jet(x); };
}

namespace {

double param_or(const json& p, const char* key, double fallback) {
  return p.contains(key) ? p.at(key).get<double>() : fallback;
}

double gl_radius(const json& p) {
  if (!p.contains("R")) throw FieldError("gl_circle: parameter R is required");
  const double R = p.at("R").get<double>();
  if (!(R > 0.0 && R < 1.0)) {
    throw FieldError("gl_circle: R must lie in the open interval (0,1), got " +
                     std::to_string(R));
  }
  return R;
}

// u_R(x) = R e^{i w x}, w = sqrt(1 - R^2): rotation at constant modulus.
void eval_gl_circle(double R, double x, Jet2& j) {
  const double w = std::sqrt(1.0 - R * R);
  const double c = std::cos(w * x);
  const double s = std::sin(w * x);
  j.u[0] = R * c;
  j.u[1] = R * s;
  j.Du(0, 0) = -R * w * s;
  j.Du(1, 0) = R * w * c;
  j.D2u(0, 0, 0) = -w * w * R * c;
  j.D2u(1, 0, 0) = -w * w * R * s;
}

// tanh(x / sqrt 2): the heteroclinic of u'' = u^3 - u.
void eval_tanh(double x, Jet2& j) {
  const double t = std::tanh(x / std::numbers::sqrt2);
  j.u[0] = t;
  j.Du(0, 0) = (1.0 - t * t) / std::numbers::sqrt2;
  j.D2u(0, 0, 0) = -t * (1.0 - t * t);
}

}  // namespace

std::vector<std::string> catalog_names() {
  return {"constant",    "linear",      "gl_circle",           "gl_circle_planar",
          "tanh_profile", "tanh_planar", "harmonic_linear_map", "product_saddle"};
}

ClosedFormField catalog_make(const std::string& name, const json& params) {
  if (name == "constant") {
    std::vector<double> c = params.contains("value")
                                ? params.at("value").get<std::vector<double>>()
                                : std::vector<double>{0.0};
    const int n = params.contains("n") ? params.at("n").get<int>() : 1;
    if (c.empty() || n < 1) throw FieldError("constant: empty value or n < 1");
    const int m = static_cast<int>(c.size());
    return {name, params, n, m, [c](std::span<const double>, Jet2& j) { j.u = c; }};
  }
  if (name == "linear") {
    const auto A = params.contains("A") ? params.at("A").get<std::vector<std::vector<double>>>()
                                        : std::vector<std::vector<double>>{{1.0}};
    const int m = static_cast<int>(A.size());
    if (m == 0 || A[0].empty()) throw FieldError("linear: empty matrix A");
    const int n = static_cast<int>(A[0].size());
    for (const auto& row : A) {
      if (static_cast<int>(row.size()) != n) throw FieldError("linear: ragged matrix A");
    }
    std::vector<double> b = params.contains("b") ? params.at("b").get<std::vector<double>>()
                                                 : std::vector<double>(m, 0.0);
    if (static_cast<int>(b.size()) != m) throw FieldError("linear: b has wrong length");
    return {name, params, n, m, [A, b, n, m](std::span<const double> x, Jet2& j) {
              for (int r = 0; r < m; ++r) {
                double s = b[r];
                for (int c = 0; c < n; ++c) {
                  s += A[r][c] * x[c];
                  j.Du(r, c) = A[r][c];
                }
                j.u[r] = s;
              }
            }};
  }
  if (name == "gl_circle") {
    const double R = gl_radius(params);
    return {name, params, 1, 2,
            [R](std::span<const double> x, Jet2& j) { eval_gl_circle(R, x[0], j); }};
  }
  if (name == "gl_circle_planar") {
    const double R = gl_radius(params);
    return {name, params, 2, 2, [R](std::span<const double> x, Jet2& j) {
              Jet2 line(1, 2);
              eval_gl_circle(R, x[0], line);
              for (int c = 0; c < 2; ++c) {
                j.u[c] = line.u[c];
                j.Du(c, 0) = line.Du(c, 0);
                j.D2u(c, 0, 0) = line.D2u(c, 0, 0);
              }
            }};
  }
  if (name == "tanh_profile") {
    return {name, params, 1, 1,
            [](std::span<const double> x, Jet2& j) { eval_tanh(x[0], j); }};
  }
  if (name == "tanh_planar") {
    // profile across the line x . e = 0 with e = (cos angle, sin angle)
    const double a = param_or(params, "angle", 0.0);
    const double e[2] = {std::cos(a), std::sin(a)};
    return {name, params, 2, 1, [e0 = e[0], e1 = e[1]](std::span<const double> x, Jet2& j) {
              const double dir[2] = {e0, e1};
              Jet2 line(1, 1);
              eval_tanh(e0 * x[0] + e1 * x[1], line);
              j.u[0] = line.u[0];
              for (int i = 0; i < 2; ++i) {
                j.Du(0, i) = line.Du(0, 0) * dir[i];
                for (int k = 0; k < 2; ++k) j.D2u(0, i, k) = line.D2u(0, 0, 0) * dir[i] * dir[k];
              }
            }};
  }
  if (name == "harmonic_linear_map") {
    // scale * rotation: conformal and harmonic
    const double s = param_or(params, "scale", 1.0);
    const double a = param_or(params, "angle", 0.0);
    const double c = s * std::cos(a);
    const double d = s * std::sin(a);
    return {name, params, 2, 2, [c, d](std::span<const double> x, Jet2& j) {
              j.u[0] = c * x[0] - d * x[1];
              j.u[1] = d * x[0] + c * x[1];
              j.Du(0, 0) = c;
              j.Du(0, 1) = -d;
              j.Du(1, 0) = d;
              j.Du(1, 1) = c;
            }};
  }
  if (name == "product_saddle") {
    return {name, params, 2, 1, [](std::span<const double> x, Jet2& j) {
              j.u[0] = x[0] * x[1];
              j.Du(0, 0) = x[1];
              j.Du(0, 1) = x[0];
              j.D2u(0, 0, 1) = 1.0;
              j.D2u(0, 1, 0) = 1.0;
            }};
  }
  throw FieldError("unknown closed-form field '" + name + "'");
}

Jet2 pointwise_fd_jet(const ClosedFormField& f, std::span<const double> x, double h) {
  const int n = f.n();
  const int m = f.m();
  Jet2 j(n, m);
  j.x.assign(x.begin(), x.end());
  j.u = f.value(x);
  std::vector<double> p(x.begin(), x.end());
  auto eval_shift = [&](int i, double di, int k, double dk) {
    p.assign(x.begin(), x.end());
    p[i] += di;
    p[k] += dk;
    return f.value(p);
  };
  for (int i = 0; i < n; ++i) {
    const auto up = eval_shift(i, h, i, 0.0);
    const auto dn = eval_shift(i, -h, i, 0.0);
    for (int c = 0; c < m; ++c) {
      j.Du(c, i) = (up[c] - dn[c]) / (2.0 * h);
      j.D2u(c, i, i) = (up[c] - 2.0 * j.u[c] + dn[c]) / (h * h);
    }
    for (int k = i + 1; k < n; ++k) {
      const auto pp = eval_shift(i, h, k, h);
      const auto pm = eval_shift(i, h, k, -h);
      const auto mp = eval_shift(i, -h, k, h);
      const auto mm = eval_shift(i, -h, k, -h);
      for (int c = 0; c < m; ++c) {
        const double v = (pp[c] - pm[c] - mp[c] + mm[c]) / (4.0 * h * h);
        j.D2u(c, i, k) = v;
        j.D2u(c, k, i) = v;
      }
    }
  }
  return j;
}

// ---------------------------------------------------------------------------
// GridField

GridField::GridField(int n, int m, std::vector<double> origin, std::vector<double> h,
                     std::vector<int> extents, std::vector<double> values)
    : n_(n), m_(m), origin_(std::move(origin)), h_(std::move(h)),
      extents_(std::move(extents)), values_(std::move(values)) {
  if (n_ != 1 && n_ != 2) throw FieldError("GridField: n must be 1 or 2");
  if (m_ < 1) throw FieldError("GridField: m must be >= 1");
  if (static_cast<int>(origin_.size()) != n_ || static_cast<int>(h_.size()) != n_ ||
      static_cast<int>(extents_.size()) != n_) {
    throw FieldError("GridField: origin/h/extents must have n entries");
  }
  std::size_t count = 1;
  for (int a = 0; a < n_; ++a) {
    if (!(h_[a] > 0.0)) throw FieldError("GridField: spacing h must be > 0");
    if (extents_[a] < 5) throw FieldError("GridField: need at least 5 nodes per axis");
    count *= static_cast<std::size_t>(extents_[a]);
  }
  if (values_.size() != count * m_) throw FieldError("GridField: value count mismatch");
  for (double v : values_) {
    if (!std::isfinite(v)) throw FieldError("GridField: non-finite value");
  }
}

GridField::GridField(int n, int m, std::vector<double> origin, std::vector<double> h,
                     std::vector<int> extents)
    : GridField(n, m, origin, h, extents, [&] {
        std::size_t count = static_cast<std::size_t>(m);
        for (int e : extents) count *= static_cast<std::size_t>(std::max(e, 0));
        return std::vector<double>(count, 0.0);
      }()) {}

std::size_t GridField::flat(std::span<const int> idx) const {
  return n_ == 1 ? static_cast<std::size_t>(idx[0])
                 : static_cast<std::size_t>(idx[0]) * extents_[1] + idx[1];
}

std::array<int, 2> GridField::multi(std::size_t f) const {
  if (n_ == 1) return {static_cast<int>(f), 0};
  return {static_cast<int>(f / extents_[1]), static_cast<int>(f % extents_[1])};
}

std::vector<double> GridField::node_position(std::span<const int> idx) const {
  std::vector<double> x(n_);
  for (int a = 0; a < n_; ++a) x[a] = origin_[a] + idx[a] * h_[a];
  return x;
}

int GridField::boundary_distance(std::span<const int> idx) const {
  int d = extents_[0];
  for (int a = 0; a < n_; ++a) {
    if (idx[a] < 0 || idx[a] >= extents_[a]) return -1;
    d = std::min({d, idx[a], extents_[a] - 1 - idx[a]});
  }
  return d;
}

Jet2 GridField::fd_jet(std::span<const int> idx, StencilOrder order) const {
  const int need = order == StencilOrder::second ? 1 : 2;
  if (boundary_distance(idx) < need) {
    throw FieldError("fd_jet: node lacks full stencil support (boundary node)");
  }
  Jet2 j(n_, m_);
  j.x = node_position(idx);
  std::array<int, 2> p{idx[0], n_ == 2 ? idx[1] : 0};
  auto val = [&](int a, int da, int b, int db, int c) {
    std::array<int, 2> q = p;
    q[a] += da;
    q[b] += db;
    return values_[flat(std::span<const int>(q.data(), n_)) * m_ + c];
  };
  for (int c = 0; c < m_; ++c) j.u[c] = val(0, 0, 0, 0, c);
  for (int a = 0; a < n_; ++a) {
    const double h = h_[a];
    for (int c = 0; c < m_; ++c) {
      const double u0 = val(a, 0, a, 0, c);
      const double up1 = val(a, 1, a, 0, c);
      const double um1 = val(a, -1, a, 0, c);
      if (order == StencilOrder::second) {
        j.Du(c, a) = (up1 - um1) / (2.0 * h);
        j.D2u(c, a, a) = (up1 - 2.0 * u0 + um1) / (h * h);
      } else {
        const double up2 = val(a, 2, a, 0, c);
        const double um2 = val(a, -2, a, 0, c);
        j.Du(c, a) = (-up2 + 8.0 * up1 - 8.0 * um1 + um2) / (12.0 * h);
        j.D2u(c, a, a) = (-up2 + 16.0 * up1 - 30.0 * u0 + 16.0 * um1 - um2) / (12.0 * h * h);
      }
    }
  }
  if (n_ == 2) {
    const double h0 = h_[0];
    const double h1 = h_[1];
    for (int c = 0; c < m_; ++c) {
      double v = 0.0;
      if (order == StencilOrder::second) {
        v = (val(0, 1, 1, 1, c) - val(0, 1, 1, -1, c) - val(0, -1, 1, 1, c) +
             val(0, -1, 1, -1, c)) /
            (4.0 * h0 * h1);
      } else {
        // tensor product of the fourth-order first-derivative stencil
        static constexpr std::array<int, 4> off{-2, -1, 1, 2};
        static constexpr std::array<double, 4> w{1.0, -8.0, 8.0, -1.0};
        for (int r = 0; r < 4; ++r) {
          for (int s = 0; s < 4; ++s) v += w[r] * w[s] * val(0, off[r], 1, off[s], c);
        }
        v /= 144.0 * h0 * h1;
      }
      j.D2u(c, 0, 1) = v;
      j.D2u(c, 1, 0) = v;
    }
  }
  return j;
}

std::vector<int> GridField::node_of(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) throw FieldError("jet: point dimension mismatch");
  std::vector<int> idx(n_);
  for (int a = 0; a < n_; ++a) {
    const double s = (x[a] - origin_[a]) / h_[a];
    const double r = std::round(s);
    if (std::abs(s - r) > 1e-9) {
      throw FieldError("jet: point is not a grid node (no interpolation between nodes)");
    }
    if (r < 0 || r >= extents_[a]) throw FieldError("jet: point outside the grid");
    idx[a] = static_cast<int>(r);
  }
  return idx;
}

Jet2 GridField::jet(std::span<const double> x, StencilOrder order) const {
  const auto idx = node_of(x);
  return fd_jet(idx, order);
}

JetSource GridField::source(StencilOrder order) const {
  return [g = *this, order](std::span<const double> x) { return g.jet(x, order); };
}

std::vector<Jet2> GridField::interior_jets(int min_distance, StencilOrder order) const {
  std::vector<Jet2> out;
  for (std::size_t f = 0; f < node_count(); ++f) {
    const auto idx = multi(f);
    const std::span<const int> s(idx.data(), n_);
    if (boundary_distance(s) >= min_distance) out.push_back(fd_jet(s, order));
  }
  return out;
}

GridField sample_grid(const ClosedFormField& f, std::vector<double> origin,
                      std::vector<double> h, std::vector<int> extents) {
  GridField g(f.n(), f.m(), origin, h, extents);
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    const auto idx = g.multi(k);
    const auto x = g.node_position(std::span<const int>(idx.data(), f.n()));
    const auto u = f.value(x);
    for (int c = 0; c < f.m(); ++c) g.values()[k * f.m() + c] = u[c];
  }
  return g;
}

}  // namespace gradlab
