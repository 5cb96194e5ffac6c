#include "gradlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace gradlab {

double Trajectory::max_drift() const {
  double d = 0.0;
  for (double h : H) d = std::max(d, std::abs(h - H.front()));
  return d;
}

void Trajectory::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw DynamicsError("cannot open " + path.string());
  out << "t";
  for (int c = 0; c < m; ++c) out << ",u_" << c + 1;
  for (int c = 0; c < m; ++c) out << ",v_" << c + 1;
  out << ",H\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (std::size_t k = 0; k < size(); ++k) {
    put(t[k]);
    for (double v : states[k].u) out << ',', put(v);
    for (double v : states[k].v) out << ',', put(v);
    out << ',';
    put(H[k]);
    out << '\n';
  }
  if (!out) throw DynamicsError("write failed for " + path.string());
}

BlowUpError::BlowUpError(std::size_t last_valid, Trajectory partial)
    : std::runtime_error("integration blew up after step " + std::to_string(last_valid)),
      last_valid_(last_valid),
      partial_(std::move(partial)) {}

double hamiltonian(const Potential& p, const PhasePoint& s) {
  double kin = 0.0;
  for (double v : s.v) kin += v * v;
  return 0.5 * kin - p.value(s.u);
}

namespace {

bool blown_up(const std::vector<double>& u, const std::vector<double>& v) {
  double r2 = 0.0;
  for (double x : u) {
    if (!std::isfinite(x)) return true;
    r2 += x * x;
  }
  for (double x : v) {
    if (!std::isfinite(x)) return true;
  }
  return r2 > 1e12;
}

}  // namespace

Trajectory integrate(const Potential& p, const PhasePoint& start, double dt, std::size_t steps,
                     double drift_tolerance) {
  if (!(dt > 0.0)) throw DynamicsError("integrate: dt must be > 0");
  if (steps < 1) throw DynamicsError("integrate: steps must be >= 1");
  const int m = p.m();
  if (static_cast<int>(start.u.size()) != m || static_cast<int>(start.v.size()) != m) {
    throw DynamicsError("integrate: phase point dimension does not match the potential");
  }
  Trajectory tr;
  tr.m = m;
  tr.dt = dt;
  tr.drift_tolerance = drift_tolerance;
  tr.t.reserve(steps + 1);
  tr.states.reserve(steps + 1);
  tr.H.reserve(steps + 1);
  if (blown_up(start.u, start.v)) throw BlowUpError(0, tr);
  tr.t.push_back(0.0);
  tr.states.push_back(start);
  tr.H.push_back(hamiltonian(p, start));

  std::vector<double> u = start.u;
  std::vector<double> v = start.v;
  std::vector<double> g(m);
  for (std::size_t k = 1; k <= steps; ++k) {
    for (int c = 0; c < m; ++c) u[c] += 0.5 * dt * v[c];
    p.gradient(u, g);
    for (int c = 0; c < m; ++c) {
      v[c] += dt * g[c];
      u[c] += 0.5 * dt * v[c];
    }
    if (blown_up(u, v)) throw BlowUpError(k - 1, std::move(tr));
    tr.t.push_back(static_cast<double>(k) * dt);
    tr.states.push_back({u, v});
    tr.H.push_back(hamiltonian(p, tr.states.back()));
  }
  return tr;
}

PhasePoint OrbitFamily::start() const { return {{R, 0.0}, {0.0, R * omega}}; }

PhasePoint OrbitFamily::at(double x) const {
  const double c = std::cos(omega * x);
  const double s = std::sin(omega * x);
  return {{R * c, R * s}, {-R * omega * s, R * omega * c}};
}

Trajectory sample_exact(const OrbitFamily& f, const Potential& p, double dt, std::size_t steps) {
  if (p.m() != 2) throw DynamicsError("sample_exact: planar potential required");
  Trajectory tr;
  tr.m = 2;
  tr.dt = dt;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double x = dt * static_cast<double>(k);
    tr.t.push_back(x);
    tr.states.push_back(f.at(x));
    tr.H.push_back(hamiltonian(p, tr.states.back()));
  }
  return tr;
}

OrbitFamily orbit_family(double R) {
  if (!(R > 0.0 && R < 1.0)) throw DynamicsError("orbit_family: R must lie in (0, 1)");
  OrbitFamily f;
  const double s = R * R;
  f.R = R;
  f.mu = 1.0 - s;
  f.omega = std::sqrt(f.mu);
  f.period = 2.0 * std::numbers::pi / f.omega;
  f.lambda = 0.25 * (s - 1.0) * (s - 1.0);
  f.H = (-3.0 * s * s + 4.0 * s - 1.0) / 4.0;
  return f;
}

Trajectory shoot_heteroclinic(const Potential& p, double a_minus, double a_plus, double tol,
                              double dt) {
  if (p.m() != 1) throw DynamicsError("shoot_heteroclinic: scalar potential required");
  if (!(a_minus < a_plus)) throw DynamicsError("shoot_heteroclinic: need a_minus < a_plus");
  if (!(tol > 0.0) || !(dt > 0.0)) throw DynamicsError("shoot_heteroclinic: tol, dt must be > 0");
  auto W = [&p](double u) { return p.value(std::span<const double>(&u, 1)); };
  const double zero_tol = 1e-12;
  if (W(a_minus) > zero_tol || W(a_plus) > zero_tol) {
    throw DynamicsError("shoot_heteroclinic: endpoints are not zeros of W");
  }
  constexpr int probes = 2000;
  for (int k = 1; k < probes; ++k) {
    const double u = a_minus + (a_plus - a_minus) * k / probes;
    if (!(W(u) > 0.0)) throw DynamicsError("shoot_heteroclinic: W vanishes inside the interval");
  }

  auto speed = [&](double u) { return std::sqrt(2.0 * std::max(W(u), 0.0)); };
  // sign = +1 follows u' = speed(u) forward in x; -1 runs the same profile backward.
  auto branch = [&](double sign, double target) {
    std::vector<double> us{0.5 * (a_minus + a_plus)};
    const std::size_t max_steps = static_cast<std::size_t>(1e7);
    while (std::abs(us.back() - target) > tol) {
      if (us.size() > max_steps) throw DynamicsError("shoot_heteroclinic: no convergence");
      const double u = us.back();
      const double k1 = sign * speed(u);
      const double k2 = sign * speed(u + 0.5 * dt * k1);
      const double k3 = sign * speed(u + 0.5 * dt * k2);
      const double k4 = sign * speed(u + dt * k3);
      us.push_back(u + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0);
    }
    return us;
  };
  const auto fwd = branch(1.0, a_plus);
  const auto bwd = branch(-1.0, a_minus);

  Trajectory tr;
  tr.m = 1;
  tr.dt = dt;
  tr.drift_tolerance = tol;
  const std::size_t nb = bwd.size() - 1;
  for (std::size_t k = nb; k >= 1; --k) {
    tr.t.push_back(-static_cast<double>(k) * dt);
    tr.states.push_back({{bwd[k]}, {speed(bwd[k])}});
  }
  for (std::size_t k = 0; k < fwd.size(); ++k) {
    tr.t.push_back(static_cast<double>(k) * dt);
    tr.states.push_back({{fwd[k]}, {speed(fwd[k])}});
  }
  for (const auto& s : tr.states) tr.H.push_back(hamiltonian(p, s));
  return tr;
}

}  // namespace gradlab
