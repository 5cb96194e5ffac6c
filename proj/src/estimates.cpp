#include "gradlab/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gradlab/quadrature.hpp"
#include "gradlab/smooth.hpp"

namespace gradlab::estimates {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Eigen::VectorXd as_vector(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double sym_min_eig(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void require_gl(const Potential& p, const char* who) {
  if (p.id() != "ginzburg_landau" && p.id() != "double_well") {
    throw EstimateError(std::string(who) + ": Ginzburg-Landau potential required, got '" +
                        p.id() + "'");
  }
}

}  // namespace

// ---- pointwise ---------------------------------------------------------------

double modica_defect(const Jet2& jet, const Potential& p) {
  return 0.5 * jet.grad_sq() - p.value(jet.u);
}

double gl_pointwise_bound(const Jet2& jet) {
  return 0.5 * (1.0 - jet.value_sq()) - 0.5 * jet.grad_sq();
}

std::vector<Jet2> jets_at(const JetSource& field, const PointSet& points) {
  std::vector<Jet2> out;
  out.reserve(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    out.push_back(field(std::span<const double>(points.point(k), points.dim)));
  }
  return out;
}

std::vector<Jet2> trajectory_jets(const Trajectory& tr, const Potential& p) {
  std::vector<Jet2> out;
  out.reserve(tr.size());
  std::vector<double> g(tr.m);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    Jet2 j(1, tr.m);
    j.x = {tr.t[k]};
    j.u = tr.states[k].u;
    j.du = tr.states[k].v;
    p.gradient(j.u, g);
    j.d2u = g;
    out.push_back(std::move(j));
  }
  return out;
}

DefectReport modica_check(std::span<const Jet2> jets, const Potential& p, double tol) {
  DefectReport rep("modica", tol);
  for (const auto& j : jets) rep.add(-modica_defect(j, p), j.x);
  return rep.finalize();
}

DefectReport gl_bound_check(std::span<const Jet2> jets, double tol) {
  DefectReport rep("gl_bound", tol);
  for (const auto& j : jets) rep.add(gl_pointwise_bound(j), j.x);
  return rep.finalize();
}

// ---- barrier -------------------------------------------------------------------

PhiBarrier::PhiBarrier(double eps) : eps_(eps) {
  if (!(eps > 0.0 && eps <= 1.0 / 12.0)) {
    throw EstimateError("build_phi: eps must lie in (0, 1/12]");
  }
  ramp_moment_ = quad::composite([](double x) { return smooth::ramp_integral(x); }, 0.0, 1.0,
                                 16, 20);
}

double PhiBarrier::rho(double t) const {
  if (t <= 0.0) return eps_;
  if (t >= 2.0 * eps_) return t;
  return eps_ + 2.0 * eps_ * smooth::ramp_integral(t / (2.0 * eps_));
}

double PhiBarrier::rho_slope(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= 2.0 * eps_) return 1.0;
  return smooth::step(t / (2.0 * eps_)).d[0];
}

double PhiBarrier::antiderivative(double t) const {
  if (t <= 0.0) return eps_ * t;
  const double e2 = 2.0 * eps_;
  if (t < e2) {
    // integral_0^y R = y R(y) - integral_0^y z S(z) dz
    const double y = t / e2;
    const double zS = quad::composite([](double z) { return z * smooth::step(z).value(); }, 0.0,
                                      y, 16, 20);
    return eps_ * t + e2 * e2 * (y * smooth::ramp_integral(y) - zS);
  }
  const double at_join = 2.0 * eps_ * eps_ + 4.0 * eps_ * eps_ * ramp_moment_;
  return at_join + 0.5 * (t * t - e2 * e2);
}

double PhiBarrier::phi(double s) const {
  return (antiderivative(6.0 * s + 1.0) - antiderivative(1.0)) / 6.0;
}

double PhiBarrier::limit(double s) {
  return s >= -1.0 / 6.0 ? 3.0 * s * s + s : -1.0 / 12.0;
}

double PhiBarrier::sup_gap(int count) const {
  double gap = 0.0;
  for (int k = 0; k <= count; ++k) {
    const double s = -0.5 + 0.5 * k / count;
    gap = std::max(gap, std::abs(phi(s) - limit(s)));
  }
  return gap;
}

PhiBarrier build_phi(double eps) { return PhiBarrier(eps); }

// ---- P-function residuals ----------------------------------------------------------

std::string to_string(PVariant v) {
  switch (v) {
    case PVariant::scalar_P:
      return "scalar_P";
    case PVariant::theorem0_P:
      return "theorem0_P";
    case PVariant::gl_P:
      return "gl_P";
    case PVariant::ode_phi_P:
      return "ode_phi_P";
  }
  return "unknown";
}

PVariant parse_variant(const std::string& name) {
  for (PVariant v : {PVariant::scalar_P, PVariant::theorem0_P, PVariant::gl_P,
                     PVariant::ode_phi_P}) {
    if (to_string(v) == name) return v;
  }
  throw EstimateError("unknown P variant '" + name + "'");
}

Eigen::MatrixXd Theorem0Config::K() const {
  const Eigen::MatrixXd Dinv = nu.cwiseInverse().asDiagonal();
  return A * Dinv + Dinv * A;
}

Theorem0Config make_theorem0_config(const Eigen::VectorXd& nu, const Eigen::MatrixXd& A,
                                    double M, int samples) {
  const Eigen::Index m = nu.size();
  if (m < 1 || A.rows() != m || A.cols() != m) {
    throw EstimateError("theorem0: D and A must be m x m with m >= 1");
  }
  if ((nu.array() <= 0.0).any()) throw HypothesisError("theorem0: D must have nu_i > 0");
  if (!(M > 0.0)) throw EstimateError("theorem0: M must be > 0");
  Theorem0Config cfg;
  cfg.nu = nu;
  cfg.A = A;
  cfg.M = M;
  const Eigen::MatrixXd K = cfg.K();
  const double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
  if (sym_min_eig(K) < -1e-12 * scale) {
    throw HypothesisError("theorem0: A D^-1 + D^-1 A is not positive semidefinite");
  }
  cfg.c = sym_min_eig(A);
  if (!(cfg.c > 0.0)) throw HypothesisError("theorem0: A is not coercive");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  cfg.a = svd.singularValues()(0);

  const Eigen::MatrixXd Ssym = A + A.transpose();
  const double mu = Ssym(0, 0) * nu(0);
  const Eigen::MatrixXd Dinv = nu.cwiseInverse().asDiagonal();
  cfg.gradient = (Ssym - mu * Dinv).cwiseAbs().maxCoeff() <= 1e-12 * scale;

  const double numax = nu.maxCoeff();
  const double mm = static_cast<double>(m);
  const PointSet vs = ball_samples(static_cast<int>(m), std::sqrt(M), samples);
  double lambda = -kInf;
  for (std::size_t k = 0; k < vs.size(); ++k) {
    const Eigen::VectorXd v = as_vector({vs.point(k), static_cast<std::size_t>(m)});
    const double need = (0.5 * numax * v.dot(K * v) - v.dot(A * v) + 1.0 +
                         2.0 * cfg.a * mm * M) / cfg.c;
    lambda = std::max(lambda, need);
  }
  cfg.lambda = lambda;
  cfg.samples = vs.size();
  return cfg;
}

namespace {

/// P at a jet for the variants that only need first-order information.
double p_value(PVariant variant, const Jet2& j, const Potential& p, const ResidualConfig& cfg) {
  switch (variant) {
    case PVariant::scalar_P:
      return 0.5 * j.grad_sq() - p.value(j.u);
    case PVariant::theorem0_P: {
      const Theorem0Config& t0 = *cfg.theorem0;
      double kin = 0.0;
      for (int c = 0; c < j.m; ++c) {
        double g = 0.0;
        for (int i = 0; i < j.n; ++i) g += j.Du(c, i) * j.Du(c, i);
        kin += 0.5 * t0.nu(c) * g;
      }
      const Eigen::VectorXd u = as_vector(j.u);
      return kin + 0.5 * t0.lambda * (u.dot(t0.A * u) - 1.0);
    }
    case PVariant::gl_P:
      return 0.5 * j.grad_sq() + 0.5 * (j.value_sq() - 1.0);
    case PVariant::ode_phi_P:
      return 0.5 * j.grad_sq() - p.value(j.u) + cfg.phi->phi(0.5 * (j.value_sq() - 1.0));
  }
  return 0.0;
}

double hessian_energy(PVariant variant, const Jet2& j, const ResidualConfig& cfg) {
  if (variant != PVariant::theorem0_P) return j.hessian_sq();
  double B = 0.0;
  const int nn = j.n * j.n;
  for (int c = 0; c < j.m; ++c) {
    double s = 0.0;
    for (int q = 0; q < nn; ++q) s += j.d2u[c * nn + q] * j.d2u[c * nn + q];
    B += cfg.theorem0->nu(c) * s;
  }
  return B;
}

}  // namespace

double pde_inequality_residual(PVariant variant, const JetSource& field,
                               std::span<const double> x, const Potential& p,
                               const ResidualConfig& cfg) {
  if (!(cfg.h > 0.0)) throw EstimateError("residual: h must be > 0");
  if (variant == PVariant::theorem0_P && !cfg.theorem0) {
    throw EstimateError("residual: theorem0_P needs a Theorem0Config");
  }
  if (variant == PVariant::ode_phi_P && !cfg.phi) {
    throw EstimateError("residual: ode_phi_P needs a PhiBarrier");
  }
  const Jet2 c = field(x);
  if (variant == PVariant::scalar_P && c.m != 1) throw EstimateError("scalar_P needs m = 1");
  if (variant == PVariant::ode_phi_P && c.n != 1) throw EstimateError("ode_phi_P needs n = 1");
  const int n = c.n;
  const double h = cfg.h;
  const double P0 = p_value(variant, c, p, cfg);
  std::vector<double> gradP(n);
  double lapP = 0.0;
  std::vector<double> y(x.begin(), x.end());
  for (int i = 0; i < n; ++i) {
    y[i] = x[i] + h;
    const double Pp = p_value(variant, field(y), p, cfg);
    y[i] = x[i] - h;
    const double Pm = p_value(variant, field(y), p, cfg);
    y[i] = x[i];
    gradP[i] = (Pp - Pm) / (2.0 * h);
    lapP += (Pp - 2.0 * P0 + Pm) / (h * h);
  }

  switch (variant) {
    case PVariant::scalar_P: {
      const double Wp = p.gradient(c.u)[0];
      double gP2 = 0.0;
      double cross = 0.0;
      for (int i = 0; i < n; ++i) {
        gP2 += gradP[i] * gradP[i];
        cross += c.Du(0, i) * gradP[i];
      }
      return c.grad_sq() * lapP - 0.5 * gP2 - 2.0 * Wp * cross;
    }
    case PVariant::theorem0_P: {
      const Eigen::VectorXd u = as_vector(c.u);
      return lapP - hessian_energy(variant, c, cfg) - u.dot(cfg.theorem0->K() * u) * P0;
    }
    case PVariant::gl_P:
      return lapP - hessian_energy(variant, c, cfg) - 2.0 * c.value_sq() * P0;
    case PVariant::ode_phi_P: {
      const double Q = 0.5 * (c.value_sq() - 1.0);
      return lapP - 2.0 * cfg.phi->phi_slope(Q) * P0;
    }
  }
  return 0.0;
}

DefectReport ode_phi_residuals(const Trajectory& tr, const Potential& p, const PhiBarrier& phi,
                               double tol) {
  DefectReport rep("ode_phi_P", tol);
  if (tr.size() < 3) return rep.finalize();
  std::vector<double> P(tr.size());
  std::vector<double> Q(tr.size());
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const auto& s = tr.states[k];
    Q[k] = 0.5 * (dot(s.u, s.u) - 1.0);
    P[k] = 0.5 * dot(s.v, s.v) - p.value(s.u) + phi.phi(Q[k]);
  }
  const double h2 = tr.dt * tr.dt;
  for (std::size_t k = 1; k + 1 < tr.size(); ++k) {
    const double Pxx = (P[k + 1] - 2.0 * P[k] + P[k - 1]) / h2;
    const double x = tr.t[k];
    rep.add(Pxx - 2.0 * phi.phi_slope(Q[k]) * P[k], {&x, 1});
  }
  rep.constants = {{"eps", phi.eps()}, {"dt", tr.dt}};
  return rep.finalize();
}

// ---- theorem checks ------------------------------------------------------------------

DefectReport theorem0_check(const Theorem0Config& cfg, std::span<const Jet2> jets, double tol,
                            double solution_tol) {
  DefectReport rep("theorem3.1", tol);
  const int m = cfg.m();
  double gate = 0.0;
  double confinement = kInf;
  for (const auto& j : jets) {
    if (j.m != m) throw EstimateError("theorem0: field dimension does not match D and A");
    const Eigen::VectorXd u = as_vector(j.u);
    const double Auu = u.dot(cfg.A * u);
    double kin = 0.0;
    for (int c = 0; c < m; ++c) {
      double g = 0.0;
      for (int i = 0; i < j.n; ++i) g += j.Du(c, i) * j.Du(c, i);
      kin += 0.5 * cfg.nu(c) * g;
      gate = std::max(gate, std::abs(cfg.nu(c) * j.laplacian(c) + (1.0 - Auu) * u(c)));
    }
    rep.add(0.5 * cfg.lambda * (1.0 - Auu) - kin, j.x);
    confinement = std::min(confinement, 1.0 - Auu);
  }
  if (gate > solution_tol) {
    throw EstimateError("theorem0: field is not a solution (residual " + std::to_string(gate) +
                        ")");
  }
  rep.finalize();
  rep.constants = {{"lambda", cfg.lambda},
                   {"a", cfg.a},
                   {"c", cfg.c},
                   {"nu_max", cfg.nu.maxCoeff()},
                   {"M", cfg.M},
                   {"lambda_samples", cfg.samples},
                   {"system", cfg.gradient ? "gradient" : "non-gradient"},
                   {"confinement_margin", jets.empty() ? nlohmann::json(nullptr)
                                                       : nlohmann::json(confinement)},
                   {"solution_residual", gate}};
  return rep;
}

Theorem1Constants theorem1_constants(const Potential& p, double R, double M, int samples) {
  if (!(R > 0.0) || !(M > 0.0)) throw EstimateError("theorem1: R and M must be > 0");
  const int m = p.m();
  std::vector<double> g(m);
  const PointSet shell = shell_samples(m, R, R + 1.0, samples);
  for (std::size_t k = 0; k < shell.size(); ++k) {
    const std::span<const double> u(shell.point(k), m);
    p.gradient(u, g);
    if (!(dot(u, g) > 0.0)) {
      throw HypothesisError("theorem1: u . grad W(u) <= 0 at a sample with |u| > R");
    }
  }
  Theorem1Constants out;
  out.R = R;
  out.M = M;
  const PointSet ball = ball_samples(m, std::sqrt(M), samples);
  double lmin = kInf;
  for (std::size_t k = 0; k < ball.size(); ++k) {
    lmin = std::min(lmin, min_hessian_eigenvalue(p, {ball.point(k), static_cast<std::size_t>(m)}));
  }
  out.mu = std::max(0.0, -lmin);

  const PointSet inner = ball_samples(m, R, samples);
  double kappa = -kInf;
  for (std::size_t k = 0; k < inner.size(); ++k) {
    const std::span<const double> u(inner.point(k), m);
    const double r2 = dot(u, u);
    if (r2 >= R * R * (1.0 - 1e-12)) continue;
    p.gradient(u, g);
    kappa = std::max(kappa, dot(u, g) / (r2 - R * R));
  }
  out.kappa = kappa;
  return out;
}

DefectReport theorem1_check(const Potential& p, std::span<const Jet2> jets, double R, double M,
                            double tol, Theorem1Constants* out) {
  const Theorem1Constants k = theorem1_constants(p, R, M);
  if (out) *out = k;
  DefectReport rep("theorem3.2", tol);
  double confinement = kInf;
  for (const auto& j : jets) {
    const double r2 = j.value_sq();
    rep.add(k.C() * (R * R - r2) - 0.5 * j.grad_sq(), j.x);
    confinement = std::min(confinement, R * R - r2);
  }
  rep.finalize();
  rep.constants = {{"R", R},
                   {"M", M},
                   {"mu", k.mu},
                   {"kappa", k.kappa},
                   {"C", k.C()},
                   {"confinement_margin", jets.empty() ? nlohmann::json(nullptr)
                                                       : nlohmann::json(confinement)}};
  return rep;
}

double convexity_complement_inf(const Potential& p, double threshold, double radius, int rays,
                                int steps) {
  const int m = p.m();
  const PointSet dirs = directions(m, rays);
  std::vector<double> u(m);
  auto at = [&](std::size_t d, double t) {
    for (int c = 0; c < m; ++c) u[c] = t * dirs.point(d)[c];
    return std::span<const double>(u);
  };
  auto in_F = [&](std::size_t d, double t) {
    return min_hessian_eigenvalue(p, at(d, t)) >= threshold;
  };
  double inf = kInf;
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    bool prev_in = in_F(d, 0.0);
    if (!prev_in) inf = std::min(inf, p.value(at(d, 0.0)));
    for (int k = 1; k <= steps; ++k) {
      const double t_prev = radius * (k - 1) / steps;
      const double t = radius * k / steps;
      const bool now_in = in_F(d, t);
      if (!now_in) inf = std::min(inf, p.value(at(d, t)));
      if (now_in != prev_in) {
        // bisect towards the region boundary, keeping the outside end
        double in_t = now_in ? t : t_prev;
        double out_t = now_in ? t_prev : t;
        for (int it = 0; it < 80; ++it) {
          const double mid = 0.5 * (in_t + out_t);
          (in_F(d, mid) ? in_t : out_t) = mid;
        }
        inf = std::min(inf, p.value(at(d, out_t)));
      }
      prev_in = now_in;
    }
  }
  return inf;
}

DefectReport theorem3_check(const Potential& p, std::span<const Jet2> jets, double threshold,
                            double search_radius, double tol, Theorem3Config* out) {
  DefectReport rep("theorem3.5", tol);
  Theorem3Config cfg;
  cfg.threshold = threshold;
  cfg.search_radius = search_radius;
  cfg.n = jets.empty() ? 1 : jets.front().n;
  cfg.eps = convexity_complement_inf(p, threshold, search_radius);
  bool outside = false;
  double grad_max = 0.0;
  for (const auto& j : jets) {
    grad_max = std::max(grad_max, j.grad_sq());
    if (min_hessian_eigenvalue(p, j.u) < threshold) {
      outside = true;
      cfg.S = std::max(cfg.S, j.grad_sq());
    }
  }
  if (out) *out = cfg;

  std::string status;
  if (!outside || cfg.S == 0.0) {
    status = "constant expected";
  } else if (!(cfg.S < 2.0 * cfg.eps / cfg.n)) {
    status = "hypothesis S < 2 eps / n fails";
  } else {
    status = "applies";
    const double factor = cfg.eps / cfg.S;
    for (const auto& j : jets) rep.add(p.value(j.u) - factor * j.grad_sq(), j.x);
  }
  rep.finalize();
  rep.constants = {{"eps", std::isfinite(cfg.eps) ? nlohmann::json(cfg.eps) : nlohmann::json(nullptr)},
                   {"S", cfg.S},
                   {"n", cfg.n},
                   {"threshold", threshold},
                   {"search_radius", search_radius},
                   {"status", status},
                   {"field_constant", grad_max <= 1e-12}};
  return rep;
}

DefectReport polygon_confinement_check(const std::vector<std::vector<double>>& vertices,
                                       const PointSet& samples, double tol) {
  const std::size_t N = vertices.size();
  if (N < 3) throw HypothesisError("polygon: need at least three vertices");
  for (const auto& v : vertices) {
    if (v.size() != 2) throw EstimateError("polygon: vertices must be planar");
  }
  if (samples.dim != 2) throw EstimateError("polygon: samples must be planar");
  auto cross = [&](std::size_t k) {
    const auto& a = vertices[k];
    const auto& b = vertices[(k + 1) % N];
    const auto& c = vertices[(k + 2) % N];
    return (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
  };
  const double orient = cross(0) > 0.0 ? 1.0 : -1.0;
  for (std::size_t k = 0; k < N; ++k) {
    if (!(orient * cross(k) > 0.0)) throw HypothesisError("polygon: vertices are not convex");
  }
  const Potential W = make_potential("polygon", {{"vertices", vertices}});
  DefectReport rep("polygon", tol);
  std::size_t excluded = 0;
  std::vector<double> g(2);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const std::span<const double> u(samples.point(s), 2);
    W.gradient(u, g);
    for (std::size_t k = 0; k < N; ++k) {
      const auto& a = vertices[k];
      const auto& b = vertices[(k + 1) % N];
      const double ex = b[0] - a[0];
      const double ey = b[1] - a[1];
      const double len = std::hypot(ex, ey);
      const double r[2] = {orient * ey / len, -orient * ex / len};
      const double side = (u[0] - a[0]) * r[0] + (u[1] - a[1]) * r[1];
      if (side > 1e-12) {
        rep.add(g[0] * r[0] + g[1] * r[1], u);
      } else {
        ++excluded;
      }
    }
  }
  rep.finalize();
  rep.constants = {{"vertices", vertices},
                   {"pairs_outside_hypothesis", excluded},
                   {"strictly_positive", rep.samples > 0 && rep.worst_margin > 0.0}};
  return rep;
}

DefectReport ode_bound_check(const Trajectory& tr, const Potential& p, double tol) {
  require_gl(p, "ode_bound_check");
  if (tr.m != p.m()) throw EstimateError("ode_bound_check: trajectory dimension mismatch");
  DefectReport rep("theorem3.4", tol);
  double S = 0.0;
  double Hmax = -kInf;
  double equality = 0.0;
  bool upper_branch = false;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const auto& st = tr.states[k];
    const double s = dot(st.u, st.u);
    const double kin = 0.5 * dot(st.v, st.v);
    const double W = p.value(st.u);
    double margin = 0.0;
    if (s >= 2.0 / 3.0) {
      margin = s * std::sqrt(W) - kin;
      equality = std::max(equality, std::abs(margin));
      upper_branch = true;
    } else {
      margin = W + 1.0 / 12.0 - kin;
    }
    const double x = tr.t[k];
    rep.add(margin, {&x, 1});
    S = std::max(S, s);
    Hmax = std::max(Hmax, kin - W);
  }
  rep.finalize();
  const double refined = S > 2.0 / 3.0 ? 0.25 * (1.0 - S) * (3.0 * S - 1.0) : 1.0 / 12.0;
  rep.constants = {
      {"S", S},
      {"H_max", Hmax},
      {"hamiltonian_margin", 1.0 / 12.0 - Hmax},
      {"refined_bound", refined},
      {"refined_margin", refined - Hmax},
      {"upper_branch_equality_defect",
       upper_branch ? nlohmann::json(equality) : nlohmann::json(nullptr)},
  };
  if (rep.verdict == Verdict::holds && (refined - Hmax < -tol || 1.0 / 12.0 - Hmax < -tol)) {
    rep.verdict = Verdict::violated;
  }
  return rep;
}

DefectReport lower_bound_envelope(std::span<const double> s_values, double dt, double tol) {
  DefectReport rep("lower_bound_ode", tol);
  const Potential gl = make_potential("ginzburg_landau", {{"m", 2}});
  const Potential dw = make_potential("double_well");
  const Trajectory het = shoot_heteroclinic(dw, -1.0, 1.0, 1e-10, dt);
  for (double s : s_values) {
    if (!(s > 0.0 && s < 1.0)) throw EstimateError("lower_bound_envelope: s must lie in (0, 1)");
    const OrbitFamily f = orbit_family(std::sqrt(s));
    const auto steps = static_cast<std::size_t>(std::ceil(f.period / dt));
    const Trajectory orbit = integrate(gl, f.start(), dt, steps);
    double circ = 0.0;
    for (const auto& st : orbit.states) circ = std::max(circ, 0.5 * dot(st.v, st.v));
    // heteroclinic crosses |u| = sqrt(s) once on each side of the midpoint
    double het_kin = 0.0;
    const double target = std::sqrt(s);
    for (std::size_t k = 0; k + 1 < het.size(); ++k) {
      const double a = het.states[k].u[0];
      const double b = het.states[k + 1].u[0];
      if ((a - target) * (b - target) <= 0.0 && a != b) {
        const double w = (target - a) / (b - a);
        const double va = het.states[k].v[0];
        const double vb = het.states[k + 1].v[0];
        const double v = va + w * (vb - va);
        het_kin = std::max(het_kin, 0.5 * v * v);
      }
    }
    const double W = 0.25 * (s - 1.0) * (s - 1.0);
    const double bound = s >= 1.0 / 3.0 ? s * std::sqrt(W) : W;
    rep.add(std::max(circ, het_kin) - bound, {&s, 1});
  }
  rep.constants = {{"dt", dt}};
  return rep.finalize();
}

DefectReport bound_ordering(std::span<const Jet2> jets, double C, double lambda, double tol) {
  DefectReport rep("bound_ordering", tol);
  for (const auto& j : jets) {
    const double gap = 1.0 - j.value_sq();
    const double b33 = 0.5 * gap;
    const double b32 = C * gap;
    const double b31 = 0.5 * lambda * gap;
    rep.add(std::min(b32 - b33, b31 - b32), j.x);
  }
  rep.constants = {{"C", C}, {"lambda", lambda}};
  return rep.finalize();
}

}  // namespace gradlab::estimates
