#include "gradlab/planar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

#include "gradlab/quadrature.hpp"
#include "gradlab/solver.hpp"

namespace gradlab::planar {

using nlohmann::json;

StressTensor stress_tensor(const Jet2& jet, const Potential& p) {
  const int n = jet.n;
  if (n < 1) throw PlanarError("stress_tensor: n must be >= 1");
  StressTensor s;
  s.gram.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = i; k < n; ++k) s.gram(i, k) = s.gram(k, i) = jet.col_dot(i, k);
  }
  const double W = p.value(jet.u);
  s.isotropic = -(0.5 * jet.grad_sq() + W) * Eigen::MatrixXd::Identity(n, n);
  s.T = s.gram + s.isotropic;
  return s;
}

UHessian hessian_U(const Jet2& jet, const Potential& p) {
  if (jet.n != 2) throw PlanarError("hessian_U: planar jets only (n = 2)");
  const double W = p.value(jet.u);
  const double a = jet.col_dot(0, 0) - jet.col_dot(1, 1);
  UHessian H;
  H.u11 = a + 2.0 * W;
  H.u22 = -a + 2.0 * W;
  H.u12 = 2.0 * jet.col_dot(0, 1);
  return H;
}

bool Convexity::consistent(double tol) const {
  const double scale = std::max({1.0, std::abs(det), std::abs(margin)});
  if (std::abs(det - margin) > tol * scale) return false;
  if (std::abs(det) <= tol * scale) return true;
  return (det >= 0.0) == (margin >= 0.0);
}

Convexity convexity_status(const Jet2& jet, const Potential& p) {
  const UHessian H = hessian_U(jet, p);
  const double W = p.value(jet.u);
  const double a = jet.col_dot(0, 0) - jet.col_dot(1, 1);
  const double b = 2.0 * jet.col_dot(0, 1);
  return {H.det(), 4.0 * W * W - a * a - b * b};
}

bool is_conformal(const Jet2& jet, const Potential& p, double tol) {
  const UHessian H = hessian_U(jet, p);
  return std::abs(p.value(jet.u)) <= tol && std::abs(H.u11) <= tol && std::abs(H.u12) <= tol &&
         std::abs(H.u22) <= tol;
}

// ---- grid checks ------------------------------------------------------------------

void require_solution(const GridField& field, const Potential& p, double gate) {
  if (!(gate > 0.0)) return;
  const double r = solver::residual(field, p);
  if (!(r <= gate)) {
    throw PlanarError("field is not a solution: residual " + std::to_string(r) + " above gate " +
                      std::to_string(gate));
  }
}

namespace {

void require_planar_grid(const GridField& f, int min_extent) {
  if (f.n() != 2) throw PlanarError("planar grid checks need n = 2");
  if (f.extents()[0] < min_extent || f.extents()[1] < min_extent) {
    throw PlanarError("grid too small for the stencil");
  }
}

// Per-node quantities from FD jets on nodes at distance >= 1; zero elsewhere.
struct NodeTable {
  int rows = 0;
  int cols = 0;
  std::vector<std::array<double, 3>> v;

  std::array<double, 3>& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
  const std::array<double, 3>& at(int r, int c) const {
    return v[static_cast<std::size_t>(r) * cols + c];
  }
};

template <class F>
NodeTable tabulate(const GridField& f, F&& entries) {
  NodeTable t{f.extents()[0], f.extents()[1], {}};
  t.v.assign(static_cast<std::size_t>(t.rows) * t.cols, {0.0, 0.0, 0.0});
  for (int r = 1; r < t.rows - 1; ++r) {
    for (int c = 1; c < t.cols - 1; ++c) {
      const int idx[2] = {r, c};
      t.at(r, c) = entries(f.fd_jet(idx));
    }
  }
  return t;
}

NodeTable u_hessians(const GridField& f, const Potential& p) {
  return tabulate(f, [&](const Jet2& j) {
    const UHessian H = hessian_U(j, p);
    return std::array<double, 3>{H.u11, H.u12, H.u22};
  });
}

}  // namespace

double divergence_sup(const GridField& field, const Potential& p, double gate) {
  require_planar_grid(field, 5);
  require_solution(field, p, gate);
  const NodeTable T = tabulate(field, [&](const Jet2& j) {
    const StressTensor s = stress_tensor(j, p);
    return std::array<double, 3>{s.T(0, 0), s.T(0, 1), s.T(1, 1)};
  });
  const double h0 = field.h()[0];
  const double h1 = field.h()[1];
  double worst = 0.0;
  for (int r = 2; r < T.rows - 2; ++r) {
    for (int c = 2; c < T.cols - 2; ++c) {
      const double d1 = (T.at(r + 1, c)[0] - T.at(r - 1, c)[0]) / (2 * h0) +
                        (T.at(r, c + 1)[1] - T.at(r, c - 1)[1]) / (2 * h1);
      const double d2 = (T.at(r + 1, c)[1] - T.at(r - 1, c)[1]) / (2 * h0) +
                        (T.at(r, c + 1)[2] - T.at(r, c - 1)[2]) / (2 * h1);
      worst = std::max({worst, std::abs(d1), std::abs(d2)});
    }
  }
  return worst;
}

RefinementPair divergence_residual(const GridField& coarse, const GridField& fine,
                                   const Potential& p, double gate) {
  return {divergence_sup(coarse, p, gate), divergence_sup(fine, p, gate)};
}

double compatibility_residual(const GridField& field, const Potential& p, double gate) {
  require_planar_grid(field, 5);
  require_solution(field, p, gate);
  const NodeTable H = u_hessians(field, p);
  const double h0 = field.h()[0];
  const double h1 = field.h()[1];
  double worst = 0.0;
  for (int r = 2; r < H.rows - 2; ++r) {
    for (int c = 2; c < H.cols - 2; ++c) {
      const double r1 = (H.at(r, c + 1)[0] - H.at(r, c - 1)[0]) / (2 * h1) -
                        (H.at(r + 1, c)[1] - H.at(r - 1, c)[1]) / (2 * h0);
      const double r2 = (H.at(r + 1, c)[2] - H.at(r - 1, c)[2]) / (2 * h0) -
                        (H.at(r, c + 1)[1] - H.at(r, c - 1)[1]) / (2 * h1);
      worst = std::max({worst, std::abs(r1), std::abs(r2)});
    }
  }
  return worst;
}

namespace {

// Gradient and value of U carried along a grid line.
struct Carry {
  double g0 = 0.0;
  double g1 = 0.0;
  double u = 0.0;
};

// One trapezoid step along `axis` between nodes with Hessians a and b.
Carry step(const Carry& from, const std::array<double, 3>& a, const std::array<double, 3>& b,
           int axis, double h) {
  Carry to = from;
  if (axis == 0) {
    to.g0 += 0.5 * h * (a[0] + b[0]);
    to.g1 += 0.5 * h * (a[1] + b[1]);
    to.u += 0.5 * h * (from.g0 + to.g0);
  } else {
    to.g0 += 0.5 * h * (a[1] + b[1]);
    to.g1 += 0.5 * h * (a[2] + b[2]);
    to.u += 0.5 * h * (from.g1 + to.g1);
  }
  return to;
}

// U on the interior block [1, rows-2] x [1, cols-2], first along `first`.
std::vector<double> integrate_paths(const NodeTable& H, int r0, int c0, int first, double h0,
                                    double h1) {
  const int rows = H.rows;
  const int cols = H.cols;
  std::vector<Carry> grid(static_cast<std::size_t>(rows) * cols);
  auto cell = [&](int r, int c) -> Carry& { return grid[static_cast<std::size_t>(r) * cols + c]; };
  cell(r0, c0) = Carry{};
  if (first == 0) {
    for (int r = r0 + 1; r <= rows - 2; ++r)
      cell(r, c0) = step(cell(r - 1, c0), H.at(r - 1, c0), H.at(r, c0), 0, h0);
    for (int r = r0 - 1; r >= 1; --r)
      cell(r, c0) = step(cell(r + 1, c0), H.at(r + 1, c0), H.at(r, c0), 0, -h0);
    for (int r = 1; r <= rows - 2; ++r) {
      for (int c = c0 + 1; c <= cols - 2; ++c)
        cell(r, c) = step(cell(r, c - 1), H.at(r, c - 1), H.at(r, c), 1, h1);
      for (int c = c0 - 1; c >= 1; --c)
        cell(r, c) = step(cell(r, c + 1), H.at(r, c + 1), H.at(r, c), 1, -h1);
    }
  } else {
    for (int c = c0 + 1; c <= cols - 2; ++c)
      cell(r0, c) = step(cell(r0, c - 1), H.at(r0, c - 1), H.at(r0, c), 1, h1);
    for (int c = c0 - 1; c >= 1; --c)
      cell(r0, c) = step(cell(r0, c + 1), H.at(r0, c + 1), H.at(r0, c), 1, -h1);
    for (int c = 1; c <= cols - 2; ++c) {
      for (int r = r0 + 1; r <= rows - 2; ++r)
        cell(r, c) = step(cell(r - 1, c), H.at(r - 1, c), H.at(r, c), 0, h0);
      for (int r = r0 - 1; r >= 1; --r)
        cell(r, c) = step(cell(r + 1, c), H.at(r + 1, c), H.at(r, c), 0, -h0);
    }
  }
  std::vector<double> U;
  U.reserve(static_cast<std::size_t>(rows - 2) * (cols - 2));
  for (int r = 1; r <= rows - 2; ++r) {
    for (int c = 1; c <= cols - 2; ++c) U.push_back(cell(r, c).u);
  }
  return U;
}

}  // namespace

UField reconstruct_U(const GridField& field, const Potential& p, std::span<const double> x0,
                     double gate, double fd_tol) {
  require_planar_grid(field, 3);
  require_solution(field, p, gate);
  const auto g = field.node_of(x0);
  if (field.boundary_distance(g) < 1) throw PlanarError("reconstruct_U: gauge node on the boundary");
  const NodeTable H = u_hessians(field, p);
  const double h0 = field.h()[0];
  const double h1 = field.h()[1];
  const auto U1 = integrate_paths(H, g[0], g[1], 0, h0, h1);
  const auto U2 = integrate_paths(H, g[0], g[1], 1, h0, h1);

  std::vector<double> U(U1.size());
  double defect = 0.0;
  for (std::size_t k = 0; k < U.size(); ++k) {
    U[k] = 0.5 * (U1[k] + U2[k]);
    defect = std::max(defect, std::abs(U1[k] - U2[k]));
  }
  if (defect > 10.0 * fd_tol) {
    throw PlanarError("reconstruct_U: path defect " + std::to_string(defect) +
                      " too large, field is not a solution");
  }
  std::vector<double> origin{field.origin()[0] + h0, field.origin()[1] + h1};
  std::vector<int> ext{field.extents()[0] - 2, field.extents()[1] - 2};
  return UField{GridField(2, 1, origin, field.h(), ext, std::move(U)), {g[0], g[1]}, defect};
}

double UField::laplacian_defect(const GridField& field, const Potential& p) const {
  const int rows = U.extents()[0];
  const int cols = U.extents()[1];
  const double h0 = U.h()[0];
  const double h1 = U.h()[1];
  double worst = 0.0;
  for (int r = 1; r < rows - 1; ++r) {
    for (int c = 1; c < cols - 1; ++c) {
      auto at = [&](int i, int j) {
        const int idx[2] = {i, j};
        return U.at(idx, 0);
      };
      const double lap = (at(r + 1, c) - 2 * at(r, c) + at(r - 1, c)) / (h0 * h0) +
                         (at(r, c + 1) - 2 * at(r, c) + at(r, c - 1)) / (h1 * h1);
      const int src[2] = {r + 1, c + 1};
      std::vector<double> u(field.m());
      for (int k = 0; k < field.m(); ++k) u[k] = field.at(src, k);
      worst = std::max(worst, std::abs(lap - 4.0 * p.value(u)));
    }
  }
  return worst;
}

// ---- quadrature -----------------------------------------------------------------------

double disk_integral(const Density& f, Point2 center, double r, DiskRule rule) {
  if (!(r > 0.0)) throw PlanarError("disk_integral: radius must be > 0");
  if (rule.radial_order < 1 || rule.angular_nodes < 1) throw PlanarError("disk_integral: bad rule");
  const auto& gl = quad::gauss_legendre(rule.radial_order);
  const double dtheta = 2.0 * std::numbers::pi / rule.angular_nodes;
  double total = 0.0;
  for (int q = 0; q < rule.radial_order; ++q) {
    const double s = 0.5 * r * (1.0 + gl.nodes[q]);
    double ring = 0.0;
    for (int k = 0; k < rule.angular_nodes; ++k) {
      const double th = dtheta * k;
      const double x[2] = {center[0] + s * std::cos(th), center[1] + s * std::sin(th)};
      ring += f(x);
    }
    total += 0.5 * r * gl.weights[q] * s * ring * dtheta;
  }
  return total;
}

DiskEstimate disk_integral_estimate(const Density& f, Point2 center, double r, DiskRule rule) {
  const double full = disk_integral(f, center, r, rule);
  const DiskRule half{std::max(1, rule.radial_order / 2), std::max(1, rule.angular_nodes / 2)};
  return {full, std::abs(full - disk_integral(f, center, r, half))};
}

json GreenIdentity::to_json() const {
  json j;
  j["lhs"] = lhs;
  j["rhs"] = rhs;
  j["defect"] = defect;
  j["rule_order"] = {{"radial", rule.radial_order}, {"boundary", rule.angular_nodes}};
  return j;
}

GreenIdentity green_boundary_identity(const JetSource& field, const Potential& p, Point2 center,
                                      double R, DiskRule rule, Box domain, double gate) {
  if (!(R > 0.0)) throw PlanarError("green: radius must be > 0");
  if (center[0] - R < domain.lo[0] || center[0] + R > domain.hi[0] ||
      center[1] - R < domain.lo[1] || center[1] + R > domain.hi[1]) {
    throw PlanarError("green: ball exits the field domain");
  }
  GreenIdentity g;
  g.rule = rule;
  g.lhs = disk_integral(
      [&](std::span<const double> x) { return 4.0 * p.value(field(x).u); }, center, R, rule);

  const int N = rule.angular_nodes;
  const double dtheta = 2.0 * std::numbers::pi / N;
  double boundary = 0.0;
  for (int k = 0; k < N; ++k) {
    const double th = dtheta * k;
    const double nu[2] = {std::cos(th), std::sin(th)};
    const double tau[2] = {-nu[1], nu[0]};
    const double x[2] = {center[0] + R * nu[0], center[1] + R * nu[1]};
    const Jet2 j = field(x);
    if (j.n != 2) throw PlanarError("green: planar field required");
    if (gate > 0.0) {
      const auto grad = p.gradient(j.u);
      for (int c = 0; c < j.m; ++c) {
        if (std::abs(j.laplacian(c) - grad[c]) > gate) {
          throw PlanarError("green: field is not a solution on the boundary circle");
        }
      }
    }
    double ut = 0.0, un = 0.0;
    for (int c = 0; c < j.m; ++c) {
      const double dt = j.Du(c, 0) * tau[0] + j.Du(c, 1) * tau[1];
      const double dn = j.Du(c, 0) * nu[0] + j.Du(c, 1) * nu[1];
      ut += dt * dt;
      un += dn * dn;
    }
    boundary += (ut - un + 2.0 * p.value(j.u)) * R * dtheta;
  }
  g.rhs = R * boundary;
  g.defect = std::abs(g.lhs - g.rhs);
  return g;
}

// ---- monotonicity ------------------------------------------------------------------------

std::string to_string(DensityKind k) {
  switch (k) {
    case DensityKind::potential_W: return "potential_W";
    case DensityKind::laplacian_of: return "laplacian_of";
    case DensityKind::grad_sq_harmonic: return "grad_sq_harmonic";
  }
  return "unknown";
}

NamedDensity potential_density(JetSource field, Potential p) {
  return {DensityKind::potential_W,
          [field = std::move(field), p = std::move(p)](std::span<const double> x) {
            return p.value(field(x).u);
          }};
}

NamedDensity laplacian_density(JetSource V) {
  return {DensityKind::laplacian_of, [V = std::move(V)](std::span<const double> x) {
            const Jet2 j = V(x);
            if (j.m != 1) throw PlanarError("laplacian density needs a scalar V");
            return j.laplacian(0);
          }};
}

NamedDensity harmonic_density(JetSource u) {
  return {DensityKind::grad_sq_harmonic, [u = std::move(u)](std::span<const double> x) {
            const Jet2 j = u(x);
            for (int c = 0; c < j.m; ++c) {
              if (std::abs(j.laplacian(c)) > 1e-8) throw PlanarError("field is not harmonic");
            }
            return j.grad_sq();
          }};
}

void MonotoneProfile::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw PlanarError("cannot open " + path.string());
  out << "r,M(r),quad_error_estimate\n";
  char buf[96];
  for (std::size_t k = 0; k < radii.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", radii[k], values[k], errors[k]);
    out << buf;
  }
  if (!out) throw PlanarError("write failed for " + path.string());
}

json MonotoneProfile::to_json() const {
  json j;
  j["density"] = to_string(density);
  j["center"] = {center[0], center[1]};
  j["radii"] = radii;
  j["values"] = values;
  j["errors"] = errors;
  j["worst_step"] = worst_step;
  j["monotone"] = monotone;
  return j;
}

MonotoneProfile monotonicity_profile(const NamedDensity& density, Point2 center,
                                     std::vector<double> radii, DiskRule rule) {
  if (radii.empty()) throw PlanarError("monotonicity_profile: no radii");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || (k > 0 && !(radii[k] > radii[k - 1]))) {
      throw PlanarError("monotonicity_profile: radii must be positive and increasing");
    }
  }
  MonotoneProfile prof;
  prof.density = density.kind;
  prof.center = center;
  for (double r : radii) {
    const DiskEstimate e = disk_integral_estimate(density.f, center, r, rule);
    prof.values.push_back(e.value / r);
    prof.errors.push_back(e.error / r);
  }
  prof.radii = std::move(radii);
  prof.worst_step = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < prof.values.size(); ++k) {
    const double allow = 2.0 * std::max(prof.errors[k], prof.errors[k + 1]) +
                         1e-13 * std::max(std::abs(prof.values[k]), std::abs(prof.values[k + 1]));
    prof.worst_step = std::min(prof.worst_step, prof.values[k + 1] - prof.values[k] + allow);
  }
  if (prof.values.size() < 2) prof.worst_step = 0.0;
  prof.monotone = prof.worst_step >= 0.0;
  return prof;
}

}  // namespace gradlab::planar
