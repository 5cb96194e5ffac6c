#include "gradlab/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gradlab/quadrature.hpp"

namespace gradlab::counterexample {

using smooth::Taylor3;
using std::numbers::pi;

// ---- rho ---------------------------------------------------------------

Taylor3 RhoSpec::eval(double alpha) const {
  if (alpha <= 0.25) return Taylor3::variable(alpha);
  if (alpha >= 0.75) return Taylor3::constant(0.5);
  const double t = 2.0 * (alpha - 0.25);
  const Taylor3 S = smooth::step(t, sharpness);
  return {{alpha - 0.5 * smooth::ramp_integral(t, sharpness), 1.0 - S.d[0], -2.0 * S.d[1],
           -4.0 * S.d[2]}};
}

double RhoSpec::value(double alpha) const { return eval(alpha).d[0]; }

double RhoSpec::slope(double alpha) const {
  if (alpha <= 0.25) return 1.0;
  if (alpha >= 0.75) return 0.0;
  return 1.0 - smooth::step(2.0 * (alpha - 0.25), sharpness).d[0];
}

RhoSpec build_rho(double sharpness) {
  if (!(sharpness > 0.0)) throw ConstructionError("rho: sharpness must be > 0");
  return RhoSpec{sharpness};
}

double lambda_from_hamiltonian() {
  // H at x = 0 is 1/2 (1/2)^2 = 1/8; on the plateau |u'| = 1 and W = lambda.
  return 0.5 - 0.125;
}

// ---- segment -------------------------------------------------------------

namespace {

struct SegmentRhs {
  double lambda;
  const RhoSpec* rho;
  std::array<double, 2> operator()(const std::array<double, 2>& s) const {
    return {s[1], 4.0 * lambda * rho->slope(s[0] * s[0]) * s[0]};
  }
};

std::array<double, 2> rk4(const SegmentRhs& f, const std::array<double, 2>& s, double h) {
  auto axpy = [](const std::array<double, 2>& a, double c, const std::array<double, 2>& b) {
    return std::array<double, 2>{a[0] + c * b[0], a[1] + c * b[1]};
  };
  const auto k1 = f(s);
  const auto k2 = f(axpy(s, 0.5 * h, k1));
  const auto k3 = f(axpy(s, 0.5 * h, k2));
  const auto k4 = f(axpy(s, h, k3));
  return {s[0] + h * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) / 6.0,
          s[1] + h * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) / 6.0};
}

}  // namespace

std::array<double, 2> SegmentSolution::state(double x) const {
  const std::size_t last = y.size() - 1;
  x = std::clamp(x, 0.0, dt * static_cast<double>(last));
  std::size_t k = static_cast<std::size_t>(x / dt);
  if (k >= last) k = last - 1;
  const double h = x - dt * static_cast<double>(k);
  const SegmentRhs f{lambda, &rho};
  return rk4(f, {y[k], v[k]}, h);
}

SegmentSolution solve_segment(double lambda, double dt, const RhoSpec& rho) {
  if (!(lambda > 0.0)) throw ConstructionError("solve_segment: lambda must be > 0");
  if (!(dt > 0.0)) throw ConstructionError("solve_segment: dt must be > 0");
  SegmentSolution seg;
  seg.lambda = lambda;
  seg.dt = dt;
  seg.rho = rho;
  const SegmentRhs f{lambda, &seg.rho};
  std::array<double, 2> s{0.0, 0.5};
  seg.y.push_back(s[0]);
  seg.v.push_back(s[1]);
  auto energy = [&](const std::array<double, 2>& st) {
    return 0.5 * st[1] * st[1] - 2.0 * lambda * rho.value(st[0] * st[0]);
  };
  const double H0 = energy(s);
  double drift = 0.0;
  const std::size_t max_steps = static_cast<std::size_t>(100.0 / dt) + 10;
  while (s[0] < 1.0) {
    if (seg.y.size() > max_steps) throw ConstructionError("solve_segment: u_2 never reaches 1");
    const auto next = rk4(f, s, dt);
    if (!(next[0] > s[0])) throw ConstructionError("solve_segment: u_2 is not increasing");
    s = next;
    seg.y.push_back(s[0]);
    seg.v.push_back(s[1]);
    drift = std::max(drift, std::abs(energy(s) - H0));
  }
  const double t_end = dt * static_cast<double>(seg.y.size() - 1);
  seg.drift = drift / t_end;
  if (seg.drift > 1e-8) {
    throw ConstructionError("solve_segment: Hamiltonian drift " + std::to_string(seg.drift) +
                            " per unit time exceeds 1e-8; reduce dt");
  }

  auto crossing = [&](double target) {
    std::size_t k = 0;
    while (seg.y[k + 1] < target) ++k;
    double lo = dt * static_cast<double>(k);
    double hi = dt * static_cast<double>(k + 1);
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      (seg.state(mid)[0] < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  seg.t1 = crossing(std::sqrt(0.75));
  seg.t2 = crossing(1.0);
  return seg;
}

// ---- curve ---------------------------------------------------------------

namespace {

constexpr int kPanelOrder = 20;

Vec2 unit_tangent(double theta) { return {std::cos(theta), std::sin(theta)}; }

}  // namespace

CurveSpec::CurveSpec(double sharpness, int knots) : sharpness_(sharpness) {
  if (!(sharpness > 0.0)) throw ConstructionError("curve: sharpness must be > 0");
  if (knots < 16 || knots % 2) throw ConstructionError("curve: knots must be even and >= 16");
  const double p = sharpness_;
  // Closure in u_1 fixes the length; closure in u_2 holds by symmetry of S.
  const double width =
      quad::composite([p](double t) { return std::sin(pi * smooth::step(t, p).d[0]); }, 0.0,
                      1.0, 64, kPanelOrder);
  length_ = 4.0 / width;

  knot_points_.assign(knots + 1, Vec2{2.0, 1.0});
  const double ds = length_ / knots;
  const auto& rule = quad::gauss_legendre(kPanelOrder);
  for (int k = 0; k < knots; ++k) {
    Vec2 acc{0.0, 0.0};
    const double mid = (k + 0.5) * ds;
    for (int q = 0; q < kPanelOrder; ++q) {
      const double s = mid + 0.5 * ds * rule.nodes[q];
      const Vec2 t = unit_tangent(0.5 * pi + pi * smooth::step(s / length_, p).d[0]);
      acc[0] += rule.weights[q] * t[0];
      acc[1] += rule.weights[q] * t[1];
    }
    knot_points_[k + 1] = {knot_points_[k][0] + 0.5 * ds * acc[0],
                           knot_points_[k][1] + 0.5 * ds * acc[1]};
  }
  const Vec2 end = knot_points_.back();
  closure_defect_ = std::hypot(end[0] + 2.0, end[1] - 1.0);
  if (closure_defect_ > 1e-8) {
    throw ConstructionError("curve: closure defect " + std::to_string(closure_defect_));
  }
  // mirror the first half onto the second so the symmetry is exact
  for (int k = knots / 2 + 1; k <= knots; ++k) {
    knot_points_[k] = {-knot_points_[knots - k][0], knot_points_[knots - k][1]};
  }

  constexpr int probes = 4001;
  for (int k = 0; k < probes; ++k) {
    const double s = length_ * k / (probes - 1);
    max_curvature_ = std::max(max_curvature_, std::abs(frame(s).curvature[0]));
  }
}

CurveSpec::Frame CurveSpec::frame(double s) const {
  const double L = length_;
  const Taylor3 S = smooth::step(s / L, sharpness_);
  Frame f;
  f.theta = 0.5 * pi + pi * S.d[0];
  f.tangent = unit_tangent(f.theta);
  f.normal = {-f.tangent[1], f.tangent[0]};
  f.curvature = {pi * S.d[1] / L, pi * S.d[2] / (L * L), pi * S.d[3] / (L * L * L)};
  f.point = knot_points_.empty() ? Vec2{0.0, 0.0} : point(s);
  return f;
}

Vec2 CurveSpec::integrate_from_knot(double s) const {
  const int n = knots();
  const double ds = length_ / n;
  const int k = std::clamp(static_cast<int>(std::floor(s / ds)), 0, n - 1);
  const double a = k * ds;
  const double half = 0.5 * (s - a);
  const auto& rule = quad::gauss_legendre(kPanelOrder);
  Vec2 acc{0.0, 0.0};
  for (int q = 0; q < kPanelOrder; ++q) {
    const double x = a + half * (1.0 + rule.nodes[q]);
    const Vec2 t = unit_tangent(0.5 * pi + pi * smooth::step(x / length_, sharpness_).d[0]);
    acc[0] += rule.weights[q] * t[0];
    acc[1] += rule.weights[q] * t[1];
  }
  return {knot_points_[k][0] + half * acc[0], knot_points_[k][1] + half * acc[1]};
}

Vec2 CurveSpec::point(double s) const {
  s = std::clamp(s, 0.0, length_);
  if (s <= 0.5 * length_) return integrate_from_knot(s);
  const Vec2 q = integrate_from_knot(length_ - s);
  return {-q[0], q[1]};
}

bool CurveSpec::project(const Vec2& w, double& s, double& mu) const {
  const int n = knots();
  int best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n; ++k) {
    const double d2 = std::pow(knot_points_[k][0] - w[0], 2) + std::pow(knot_points_[k][1] - w[1], 2);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = k;
    }
  }
  s = length_ * best / n;
  Frame f = frame(s);
  double residual = 0.0;
  for (int it = 0; it < 60; ++it) {
    const Vec2 d{f.point[0] - w[0], f.point[1] - w[1]};
    residual = d[0] * f.tangent[0] + d[1] * f.tangent[1];
    const double slope = 1.0 + f.curvature[0] * (d[0] * f.normal[0] + d[1] * f.normal[1]);
    if (slope < 0.1) return false;
    const double next = std::clamp(s - residual / slope, 0.0, length_);
    const double step = next - s;
    s = next;
    f = frame(s);
    if (std::abs(step) < 1e-15 * length_) break;
  }
  const Vec2 d{f.point[0] - w[0], f.point[1] - w[1]};
  residual = d[0] * f.tangent[0] + d[1] * f.tangent[1];
  if (std::abs(residual) > 1e-11) return false;
  mu = -(d[0] * f.normal[0] + d[1] * f.normal[1]);
  return true;
}

CurveSpec build_curve(double sharpness) { return CurveSpec(sharpness); }

// ---- tube ----------------------------------------------------------------

TubePotential::TubePotential(std::shared_ptr<const CurveSpec> curve, double lambda, double width)
    : curve_(std::move(curve)), lambda_(lambda), width_(width) {
  if (!(width > 0.0)) throw ConstructionError("tube: width must be > 0");
}

bool TubePotential::evaluate(const Vec2& w, double& W, Vec2& grad,
                             std::array<double, 4>& hess) const {
  double s = 0.0;
  double mu = 0.0;
  if (!curve_->project(w, s, mu)) return false;
  const double a = std::abs(mu);
  if (a >= 2.0 * width_) return false;

  // g(mu) = mu b(mu) and its first two derivatives
  double g0 = mu;
  double g1 = 1.0;
  double g2 = 0.0;
  if (a > width_) {
    const Taylor3 S = smooth::step((a - width_) / width_);
    const double sg = mu > 0.0 ? 1.0 : -1.0;
    const double b0 = 1.0 - S.d[0];
    const double b1 = -sg * S.d[1] / width_;
    const double b2 = -S.d[2] / (width_ * width_);
    g0 = mu * b0;
    g1 = b0 + mu * b1;
    g2 = 2.0 * b1 + mu * b2;
  }
  const CurveSpec::Frame f = curve_->frame(s);
  const double k0 = f.curvature[0];
  const double k1 = f.curvature[1];
  const double k2 = f.curvature[2];
  const double F_s = k1 * g0;
  const double F_ss = k2 * g0;
  const double F_m = k0 * g1;
  const double F_mm = k0 * g2;
  const double F_sm = k1 * g1;
  const double J = 1.0 - mu * k0;

  W = lambda_ + k0 * g0;
  const double gt = F_s / J;
  const Vec2& t = f.tangent;
  const Vec2& n = f.normal;
  grad = {gt * t[0] + F_m * n[0], gt * t[1] + F_m * n[1]};

  const double A = (F_ss / J + F_s * mu * k1 / (J * J) - F_m * k0) / J;
  const double B = F_sm / J + F_s * k0 / (J * J);
  const double C = F_mm;
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      hess[i * 2 + k] = A * t[i] * t[k] + B * (t[i] * n[k] + n[i] * t[k]) + C * n[i] * n[k];
    }
  }
  return true;
}

// ---- global potential ----------------------------------------------------

CounterexampleModel::CounterexampleModel(RhoSpec rho, std::shared_ptr<const CurveSpec> curve,
                                         double lambda, double tube_width)
    : rho_(rho), lambda_(lambda), tube_(std::move(curve), lambda, tube_width) {}

void CounterexampleModel::evaluate(std::span<const double> u, double* W, std::span<double> grad,
                                   std::span<double> hess) const {
  const double s1 = u[0] < 0.0 ? -1.0 : 1.0;
  const double s2 = u[1] < 0.0 ? -1.0 : 1.0;
  const Vec2 w{s1 * u[0], s2 * u[1]};

  double value = lambda_;
  Vec2 g{0.0, 0.0};
  std::array<double, 4> h{0.0, 0.0, 0.0, 0.0};
  double f1 = 1.0;
  if (std::abs(w[0] - 2.0) <= 1.0 && w[1] <= 1.0) {
    const Vec2 d{w[0] - 2.0, w[1]};
    const Taylor3 r = rho_.eval(d[0] * d[0] + d[1] * d[1]);
    value = 2.0 * lambda_ * r.d[0];
    g = {4.0 * lambda_ * r.d[1] * d[0], 4.0 * lambda_ * r.d[1] * d[1]};
    for (int i = 0; i < 2; ++i) {
      for (int k = 0; k < 2; ++k) {
        h[i * 2 + k] = 8.0 * lambda_ * r.d[2] * d[i] * d[k] + (i == k ? 4.0 * lambda_ * r.d[1] : 0.0);
      }
    }
    f1 = s1;
  } else {
    const Vec2 tw{u[0], w[1]};
    if (!tube_.evaluate(tw, value, g, h)) value = lambda_;
  }
  const std::array<double, 2> sign{f1, s2};
  if (W) *W = value;
  if (!grad.empty()) {
    grad[0] = sign[0] * g[0];
    grad[1] = sign[1] * g[1];
  }
  if (!hess.empty()) {
    for (int i = 0; i < 2; ++i) {
      for (int k = 0; k < 2; ++k) hess[i * 2 + k] = sign[i] * sign[k] * h[i * 2 + k];
    }
  }
}

double tube_width_for(double lambda, const CurveSpec& curve) {
  return std::min(0.1, lambda / (2.0 * curve.max_curvature()));
}

// ---- assembly --------------------------------------------------------------

PhasePoint PeriodicConnection::state(double x) const {
  if (x < 0.0 || x > T) {
    x = std::fmod(x, T);
    if (x < 0.0) x += T;
  }
  double sign = 1.0;
  if (x > 0.5 * T) {
    x -= 0.5 * T;
    sign = -1.0;
  }
  PhasePoint p{{0.0, 0.0}, {0.0, 0.0}};
  if (x <= t2) {
    const auto s = segment.state(x);
    p = {{2.0, s[0]}, {0.0, s[1]}};
  } else if (x <= t3) {
    const auto f = curve->frame(x - t2);
    p = {{f.point[0], f.point[1]}, {f.tangent[0], f.tangent[1]}};
  } else {
    const auto s = segment.state(0.5 * T - x);
    p = {{-2.0, s[0]}, {0.0, -s[1]}};
  }
  for (int c = 0; c < 2; ++c) {
    p.u[c] *= sign;
    p.v[c] *= sign;
  }
  return p;
}

Trajectory PeriodicConnection::sample(std::size_t count) const {
  if (count < 1) throw ConstructionError("sample: count must be >= 1");
  Trajectory tr;
  tr.m = 2;
  tr.dt = T / static_cast<double>(count);
  tr.drift_tolerance = 1e-7;
  for (std::size_t k = 0; k <= count; ++k) {
    const double x = tr.dt * static_cast<double>(k);
    tr.t.push_back(x);
    tr.states.push_back(state(x));
    tr.H.push_back(hamiltonian(potential, tr.states.back()));
  }
  return tr;
}

PeriodicConnection assemble(std::shared_ptr<const CurveSpec> curve, const RhoSpec& rho,
                            double lambda, double dt) {
  if (!curve) throw ConstructionError("assemble: missing curve");
  const double width = tube_width_for(lambda, *curve);
  if (width * curve->max_curvature() > 0.5 * lambda * (1.0 + 1e-12)) {
    throw ConstructionError("assemble: tube too wide for W >= lambda/2");
  }
  SegmentSolution seg = solve_segment(lambda, dt, rho);
  auto model = std::make_shared<CounterexampleModel>(rho, curve, lambda, width);

  // The tube must meet the square patch at level lambda along u_2 = 1.
  for (int k = 0; k <= 200; ++k) {
    const Vec2 w{2.0 - 2.0 * width + 4.0 * width * k / 200.0, 1.0};
    double W = 0.0;
    Vec2 g{};
    std::array<double, 4> h{};
    if (model->tube().evaluate(w, W, g, h) && std::abs(W - lambda) > 1e-8) {
      throw ConstructionError("assemble: tube and square patch disagree at the junction");
    }
  }

  PeriodicConnection pc{
      .lambda = lambda,
      .t1 = seg.t1,
      .t2 = seg.t2,
      .t3 = seg.t2 + curve->length(),
      .T = 0.0,
      .tube_width = width,
      .rho = rho,
      .curve = curve,
      .segment = std::move(seg),
      .potential = Potential("counterexample",
                             {{"sharpness", curve->sharpness()}, {"lambda", lambda},
                              {"tube_width", width}},
                             model),
  };
  pc.T = 2.0 * (pc.t2 + pc.t3);
  return pc;
}

PeriodicConnection build(double sharpness, double dt) {
  return assemble(std::make_shared<const CurveSpec>(sharpness), build_rho(),
                  lambda_from_hamiltonian(), dt);
}

// ---- verification ----------------------------------------------------------

DefectReport verify_counterexample(const PeriodicConnection& pc, const VerifyOptions& opt) {
  DefectReport rep("modica.counterexample", opt.tol);
  const Potential& p = pc.potential;
  const double h = opt.fd_step;
  const double half = 0.5 * pc.T;
  const std::array<double, 6> phase_end{pc.t2, pc.t3, half, half + pc.t2, half + pc.t3, pc.T};
  std::array<double, 6> phase_spread{};

  const PhasePoint start = pc.state(0.0);
  double residual_max = 0.0;
  double defect_max = -std::numeric_limits<double>::infinity();
  double speed_defect = 0.0;
  double symmetry_defect = 0.0;
  double oscillation = 0.0;
  std::vector<double> g(2);
  for (std::size_t k = 0; k < opt.samples; ++k) {
    const double x = pc.T * static_cast<double>(k) / static_cast<double>(opt.samples);
    const PhasePoint s = pc.state(x);
    const double P = hamiltonian(p, s);
    const double where[3] = {x, s.u[0], s.u[1]};
    rep.add(-P, where);
    defect_max = std::max(defect_max, P);
    std::size_t phase = 0;
    while (phase < 5 && x > phase_end[phase]) ++phase;
    phase_spread[phase] = std::max(phase_spread[phase], std::abs(P - 0.125));

    const PhasePoint sp = pc.state(x + h);
    const PhasePoint sm = pc.state(x - h);
    p.gradient(s.u, g);
    for (int c = 0; c < 2; ++c) {
      const double acc = (sp.u[c] - 2.0 * s.u[c] + sm.u[c]) / (h * h);
      residual_max = std::max(residual_max, std::abs(acc - g[c]));
    }
    if (x >= pc.t1 && x <= pc.t3 + (pc.t2 - pc.t1)) {
      speed_defect = std::max(speed_defect, std::abs(std::hypot(s.v[0], s.v[1]) - 1.0));
    }
    if (x < half) {
      const PhasePoint q = pc.state(x + half);
      symmetry_defect =
          std::max({symmetry_defect, std::abs(q.u[0] + s.u[0]), std::abs(q.u[1] + s.u[1])});
    }
    oscillation = std::max(oscillation, std::hypot(s.u[0] - start.u[0], s.u[1] - start.u[1]));
  }
  rep.finalize();

  const PhasePoint mid = pc.state(half);
  const PhasePoint end = pc.state(pc.T);
  const double W0 = p.value(start.u);
  const double start_defect = std::hypot(start.u[0] - 2.0, start.u[1]);
  const double half_defect = std::hypot(mid.u[0] + 2.0, mid.u[1]);
  const double periodicity = std::max({std::abs(end.u[0] - start.u[0]),
                                       std::abs(end.u[1] - start.u[1]),
                                       std::abs(end.v[0] - start.v[0]),
                                       std::abs(end.v[1] - start.v[1])});
  double spread = 0.0;
  for (double s : phase_spread) spread = std::max(spread, s);

  // W on the tube |mu| <= width
  double tube_min = std::numeric_limits<double>::infinity();
  const auto& curve = *pc.curve;
  for (int i = 0; i <= 200; ++i) {
    const auto f = curve.frame(curve.length() * i / 200.0);
    for (int j = -10; j <= 10; ++j) {
      const double mu = pc.tube_width * j / 10.0;
      const double w[2] = {f.point[0] + mu * f.normal[0], f.point[1] + mu * f.normal[1]};
      tube_min = std::min(tube_min, p.value(w));
    }
  }
  const double well[2] = {2.0, 0.0};
  const Eigen::MatrixXd H = p.hessian(well);

  const bool liouville = W0 <= 1e-14 && oscillation > 1.0 && defect_max > opt.tol;
  rep.constants = {
      {"lambda", pc.lambda},
      {"t1", pc.t1},
      {"t2", pc.t2},
      {"t3", pc.t3},
      {"T", pc.T},
      {"sharpness", curve.sharpness()},
      {"arc_length", curve.length()},
      {"max_curvature", curve.max_curvature()},
      {"closure_defect", curve.closure_defect()},
      {"tube_width", pc.tube_width},
      {"tube_min_W", tube_min},
      {"residual_max", residual_max},
      {"modica_defect", defect_max},
      {"hamiltonian_spread", spread},
      {"phase_spread", phase_spread},
      {"speed_defect", speed_defect},
      {"symmetry_defect", symmetry_defect},
      {"start_defect", start_defect},
      {"half_period_defect", half_defect},
      {"periodicity_defect", periodicity},
      {"W_at_start", W0},
      {"oscillation", oscillation},
      {"segment_drift_per_time", pc.segment.drift},
      {"well_hessian", {{H(0, 0), H(0, 1)}, {H(1, 0), H(1, 1)}}},
      {"liouville_violated", liouville},
      {"fd_step", opt.fd_step},
  };
  return rep;
}

nlohmann::json construction_report(const PeriodicConnection& pc, const DefectReport& verified) {
  const auto& c = verified.constants;
  return {
      {"lambda", pc.lambda},
      {"t1", pc.t1},
      {"t2", pc.t2},
      {"t3", pc.t3},
      {"T", pc.T},
      {"residual_max", c.at("residual_max")},
      {"modica_defect", c.at("modica_defect")},
      {"liouville_violated", c.at("liouville_violated")},
      {"shape",
       {{"sharpness", pc.curve->sharpness()},
        {"arc_length", pc.curve->length()},
        {"max_curvature", pc.curve->max_curvature()},
        {"tube_width", pc.tube_width}}},
  };
}

Potential make_potential(const nlohmann::json& params) {
  const double sharpness = params.value("sharpness", 1.0);
  const double lambda = params.value("lambda", lambda_from_hamiltonian());
  auto curve = std::make_shared<const CurveSpec>(sharpness);
  const double width = tube_width_for(lambda, *curve);
  return Potential("counterexample", params,
                   std::make_shared<CounterexampleModel>(build_rho(), curve, lambda,
                                                         width));
}

}  // namespace gradlab::counterexample
