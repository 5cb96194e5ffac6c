#include "gradlab/suite.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include "gradlab/counterexample.hpp"
#include "gradlab/dynamics.hpp"
#include "gradlab/estimates.hpp"
#include "gradlab/planar.hpp"
#include "gradlab/potentials.hpp"
#include "gradlab/solver.hpp"

namespace gradlab::suite {

using nlohmann::json;

bool SuiteResult::pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return !checks.empty();
}

json SuiteResult::to_json() const {
  json list = json::array();
  for (const auto& c : checks) {
    list.push_back({{"criterion", c.criterion},
                    {"id", c.id},
                    {"title", c.title},
                    {"pass", c.pass},
                    {"detail", c.detail}});
  }
  return {{"checks", list}, {"pass", pass()}};
}

namespace {

// Runs body, turning exceptions into a failed check, and records wall time.
CheckResult guarded(int criterion, std::string id, std::string title,
                    const std::function<bool(json&)>& body) {
  CheckResult r{criterion, std::move(id), std::move(title)};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    r.pass = body(r.detail);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail["error"] = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<Jet2> jets_along(const ClosedFormField& f, double a, double b, int count) {
  std::vector<Jet2> out;
  for (int k = 0; k < count; ++k) {
    std::vector<double> x(f.n(), 0.0);
    x[0] = a + (b - a) * k / count;
    if (f.n() == 2) x[1] = 0.37 * k / count;
    out.push_back(f.jet(x));
  }
  return out;
}

double sq(double x) { return x * x; }

}  // namespace

CheckResult counterexample_check() {
  return guarded(1, "counterexample", "periodic connection violating the Modica bound",
                 [](json& d) {
                   const auto pc = counterexample::build();
                   const auto rep = counterexample::verify_counterexample(pc);
                   const json& k = rep.constants;
                   const double residual = k.at("residual_max");
                   const double defect = k.at("modica_defect");
                   const double spread = k.at("hamiltonian_spread");
                   const double start = k.at("start_defect");
                   const double half = k.at("half_period_defect");
                   const double w0 = k.at("W_at_start");
                   d = counterexample::construction_report(pc, rep);
                   d["hamiltonian_spread"] = spread;
                   d["start_defect"] = start;
                   d["half_period_defect"] = half;
                   d["W_at_start"] = w0;
                   d["worst_margin"] = rep.worst_margin;
                   return residual <= 1e-5 && std::abs(defect - 0.125) <= 1e-7 &&
                          spread <= 1e-7 && start <= 1e-7 && half <= 1e-7 && w0 == 0.0 &&
                          rep.verdict == Verdict::violated;
                 });
}

CheckResult hamiltonian_family_check() {
  return guarded(2, "hamiltonian_family", "circular orbits: H, sign change, leapfrog drift",
                 [](json& d) {
                   const Potential gl = make_potential("ginzburg_landau", {{"m", 2}});
                   const double dt = 1e-3;
                   bool ok = true;
                   json rows = json::array();
                   for (int k = 1; k <= 9; ++k) {
                     const double R = 0.1 * k;
                     const OrbitFamily f = orbit_family(R);
                     const auto steps = static_cast<std::size_t>(std::ceil(f.period / dt));
                     const Trajectory tr = integrate(gl, f.start(), dt, steps);
                     double match = 0.0;
                     for (double h : tr.H) match = std::max(match, std::abs(h - f.H));
                     const double drift = tr.max_drift();
                     const bool sign_ok = (tr.H[0] < 0.0) == (R * R < 1.0 / 3.0);
                     ok = ok && match <= 1e-8 && drift <= 1e-8 && sign_ok;
                     rows.push_back({{"R", R}, {"H", f.H}, {"match", match}, {"drift", drift}});
                   }
                   // root of the measured H(R^2) by bisection
                   auto H_of = [&](double s) {
                     return hamiltonian(gl, orbit_family(std::sqrt(s)).start());
                   };
                   double lo = 0.01, hi = 0.81;
                   for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
                     const double mid = 0.5 * (lo + hi);
                     (H_of(mid) < 0.0 ? lo : hi) = mid;
                   }
                   const double root = 0.5 * (lo + hi);
                   d["orbits"] = rows;
                   d["sign_change_at"] = root;
                   return ok && std::abs(root - 1.0 / 3.0) <= 1e-12;
                 });
}

CheckResult gl_sharpness_check() {
  return guarded(3, "gl_sharpness", "margin of the Ginzburg-Landau bound on u_R", [](json& d) {
    bool ok = true;
    double previous = 1.0;
    json rows = json::array();
    for (double R : {0.5, 0.9, 0.99}) {
      const auto f = catalog_make("gl_circle", {{"R", R}});
      const double period = 2.0 * std::numbers::pi / std::sqrt(1.0 - R * R);
      const double expected = 0.5 * sq(1.0 - R * R);
      double worst = 0.0;
      for (const Jet2& j : jets_along(f, 0.0, period, 400)) {
        worst = std::max(worst, std::abs(estimates::gl_pointwise_bound(j) - expected));
      }
      ok = ok && worst <= 1e-10 && expected < previous;
      previous = expected;
      rows.push_back({{"R", R}, {"margin", expected}, {"deviation", worst}});
    }
    d["fields"] = rows;
    return ok && previous < 1e-3;
  });
}

CheckResult ode_bound_family_check() {
  return guarded(4, "ode_bound_family", "upper-branch equality, max H = 1/12, barrier phi_eps",
                 [](json& d) {
                   const Potential gl = make_potential("ginzburg_landau", {{"m", 2}});
                   bool ok = true;
                   json rows = json::array();
                   for (double s : {2.0 / 3.0, 0.75, 0.85, 0.95}) {
                     const OrbitFamily f = orbit_family(std::sqrt(s));
                     const auto steps = static_cast<std::size_t>(std::ceil(f.period / 1e-3));
                     const Trajectory tr = sample_exact(f, gl, 1e-3, steps);
                     const auto rep = estimates::ode_bound_check(tr, gl);
                     const double eq = rep.constants.at("upper_branch_equality_defect");
                     ok = ok && eq <= 1e-10 && rep.holds();
                     rows.push_back({{"R_squared", s}, {"equality_defect", eq}});
                   }
                   d["orbits"] = rows;

                   // golden-section search of H over R^2
                   auto H_of = [](double s) { return orbit_family(std::sqrt(s)).H; };
                   const double g = (std::sqrt(5.0) - 1.0) / 2.0;
                   double a = 0.01, b = 0.99;
                   double c = b - g * (b - a), e = a + g * (b - a);
                   while (b - a > 1e-9) {
                     if (H_of(c) > H_of(e)) {
                       b = e;
                     } else {
                       a = c;
                     }
                     c = b - g * (b - a);
                     e = a + g * (b - a);
                   }
                   const double argmax = 0.5 * (a + b);
                   const double Hmax = H_of(argmax);
                   const double H23 = hamiltonian(gl, orbit_family(std::sqrt(2.0 / 3.0)).start());
                   d["argmax_R_squared"] = argmax;
                   d["H_max"] = Hmax;
                   ok = ok && std::abs(Hmax - 1.0 / 12.0) <= 1e-12 &&
                        std::abs(H23 - 1.0 / 12.0) <= 1e-12 && std::abs(argmax - 2.0 / 3.0) <= 1e-5;

                   json gaps = json::array();
                   double last = 1.0;
                   for (double eps : {1.0 / 12.0, 0.05, 0.02, 0.01, 0.005}) {
                     const auto phi = estimates::build_phi(eps);
                     const double gap = phi.sup_gap();
                     ok = ok && gap < last;
                     last = gap;
                     if (eps == 0.01) ok = ok && gap <= 0.05;
                     // exact pieces: slope eps below -1/6, the limit above (2 eps - 1)/6
                     double piece = 0.0;
                     const double knee = (2.0 * eps - 1.0) / 6.0;
                     for (int k = 0; k <= 100; ++k) {
                       const double s = -0.5 + (-1.0 / 6.0 + 0.5) * k / 100.0;
                       piece = std::max(piece, std::abs(phi.phi_slope(s) - eps));
                       const double t = knee + (0.5 - knee) * k / 100.0;
                       piece = std::max(piece, std::abs(phi.phi(t) - (3.0 * t * t + t)));
                     }
                     ok = ok && piece <= 1e-14;
                     gaps.push_back({{"eps", eps}, {"sup_gap", gap}, {"exact_piece_defect", piece}});
                   }
                   d["phi"] = gaps;
                   return ok;
                 });
}

CheckResult derived_constants_check() {
  return guarded(5, "derived_constants", "kappa, mu, lambda = 2m+1 and bound ordering",
                 [](json& d) {
                   const Potential gl = make_potential("ginzburg_landau", {{"m", 2}});
                   const auto k = estimates::theorem1_constants(gl, 1.0, 1.0);
                   d["kappa"] = k.kappa;
                   d["mu"] = k.mu;
                   bool ok = std::abs(k.kappa - 1.0) <= 1e-3 && std::abs(k.mu - 1.0) <= 1e-3;
                   json lambdas = json::array();
                   for (int m = 1; m <= 3; ++m) {
                     const auto cfg = estimates::make_theorem0_config(
                         Eigen::VectorXd::Ones(m), Eigen::MatrixXd::Identity(m, m), 1.0);
                     ok = ok && std::abs(cfg.lambda - (2 * m + 1)) <= 1e-6;
                     lambdas.push_back({{"m", m}, {"lambda", cfg.lambda}});
                   }
                   d["lambda"] = lambdas;

                   std::vector<Jet2> jets;
                   for (double R : {0.3, 0.6, 0.9}) {
                     const auto f = catalog_make("gl_circle", {{"R", R}});
                     for (auto& j : jets_along(f, 0.0, 10.0, 200)) jets.push_back(std::move(j));
                   }
                   const auto planar_field = catalog_make("gl_circle_planar", {{"R", 0.5}});
                   for (auto& j : jets_along(planar_field, -2.0, 2.0, 200)) {
                     jets.push_back(std::move(j));
                   }
                   const auto rep = estimates::bound_ordering(jets, k.C(), 5.0);
                   d["ordering"] = rep.to_json();
                   return ok && rep.holds();
                 });
}

CheckResult convexity_threshold_check() {
  return guarded(6, "convexity_threshold", "eps = 1/9 on the amplitude 0.2 orbit", [](json& d) {
    const Potential dw = make_potential("double_well");
    const Trajectory tr = integrate(dw, {{0.2}, {0.0}}, 1e-3, 7000);
    const auto jets = estimates::trajectory_jets(tr, dw);
    estimates::Theorem3Config cfg;
    const auto rep = estimates::theorem3_check(dw, jets, 0.0, 3.0, 1e-7, &cfg);
    d["eps"] = cfg.eps;
    d["S"] = cfg.S;
    d["report"] = rep.to_json();
    return std::abs(cfg.eps - 1.0 / 9.0) <= 1e-6 && cfg.S < 2.0 * cfg.eps && rep.holds();
  });
}

GridField relaxed_front(double h, double angle, double tol) {
  const Potential dw = make_potential("double_well");
  solver::RelaxConfig cfg;
  cfg.origin = {-3.0, 0.0};
  cfg.h = {h, h};
  cfg.extents = {static_cast<int>(std::lround(6.0 / h)) + 1, static_cast<int>(std::lround(1.0 / h)) + 1};
  cfg.boundary = catalog_make("tanh_planar", {{"angle", angle}});
  cfg.tol = tol;
  auto res = solver::relax(dw, cfg, sample_grid(*cfg.boundary, cfg.origin, cfg.h, cfg.extents));
  if (!res.converged) throw solver::SolverError("relaxed_front: no convergence");
  return std::move(res.field);
}

CheckResult planar_identities_check() {
  return guarded(7, "planar_identities", "traces, div T refinement, U path independence",
                 [](json& d) {
                   std::mt19937_64 rng(20240601);
                   std::uniform_real_distribution<double> U(-1.0, 1.0);
                   double trace_T = 0.0, trace_U = 0.0;
                   for (int k = 0; k < 1000; ++k) {
                     const int m = 1 + k % 3;
                     const Potential p = make_potential("ginzburg_landau", {{"m", m}});
                     Jet2 j(2, m);
                     for (auto& v : j.u) v = U(rng);
                     for (auto& v : j.du) v = U(rng);
                     for (auto& v : j.d2u) v = U(rng);
                     const double W = p.value(j.u);
                     trace_T = std::max(trace_T, std::abs(planar::stress_tensor(j, p).trace() + 2 * W));
                     trace_U = std::max(trace_U, std::abs(planar::hessian_U(j, p).trace() - 4 * W));
                   }
                   d["trace_T_defect"] = trace_T;
                   d["trace_U_defect"] = trace_U;

                   const Potential dw = make_potential("double_well");
                   const GridField coarse = relaxed_front(0.05);
                   const GridField fine = relaxed_front(0.025);
                   const auto div = planar::divergence_residual(coarse, fine, dw);
                   const double x0[2] = {0.0, 0.5};
                   const auto Uc = planar::reconstruct_U(coarse, dw, x0);
                   const auto Uf = planar::reconstruct_U(fine, dw, x0);
                   const double path_ratio = Uc.path_defect / Uf.path_defect;
                   d["div_T"] = {{"h", 0.05}, {"coarse", div.coarse}, {"fine", div.fine},
                                 {"ratio", div.ratio()}};
                   d["U_path_defect"] = {{"coarse", Uc.path_defect}, {"fine", Uf.path_defect},
                                         {"ratio", path_ratio}};
                   return trace_T <= 1e-12 && trace_U <= 1e-12 && div.ratio() >= 3.5 &&
                          div.ratio() <= 4.5 && path_ratio >= 3.5 && path_ratio <= 4.5;
                 });
}

CheckResult convexity_dichotomy_check() {
  return guarded(8, "convexity_dichotomy", "m = 1 convexity and the R^2 > 1/3 threshold",
                 [](json& d) {
                   const Potential dw = make_potential("double_well");
                   std::mt19937_64 rng(77);
                   std::uniform_real_distribution<double> U(-1.0, 1.0);
                   std::uniform_real_distribution<double> V(-1.5, 1.5);
                   std::uniform_real_distribution<double> T(0.0, 1.0);
                   bool ok = true;
                   double worst = std::numeric_limits<double>::infinity();
                   for (int k = 0; k < 1000; ++k) {
                     Jet2 j(2, 1);
                     j.u[0] = V(rng);
                     const double a = U(rng) * std::numbers::pi;
                     // |grad u|^2 = 2 t W: Modica holds
                     const double g = std::sqrt(2.0 * T(rng) * dw.value(j.u));
                     j.du = {g * std::cos(a), g * std::sin(a)};
                     const auto c = planar::convexity_status(j, dw);
                     ok = ok && c.convex() && c.consistent();
                     worst = std::min(worst, c.margin);
                   }
                   const auto front = catalog_make("tanh_planar", {{"angle", 0.4}});
                   for (const Jet2& j : jets_along(front, -4.0, 4.0, 400)) {
                     const auto c = planar::convexity_status(j, dw);
                     ok = ok && c.convex() && c.consistent();
                     worst = std::min(worst, c.margin);
                   }
                   d["m1_worst_margin"] = worst;

                   const Potential gl = make_potential("ginzburg_landau", {{"m", 2}});
                   json rows = json::array();
                   for (double s : {0.3, 0.5}) {
                     const auto f = catalog_make("gl_circle_planar", {{"R", std::sqrt(s)}});
                     bool convex = true;
                     double entry = 0.0;
                     for (const Jet2& j : jets_along(f, -3.0, 3.0, 200)) {
                       const auto c = planar::convexity_status(j, gl);
                       ok = ok && c.consistent();
                       convex = convex && c.convex();
                       entry = std::max(entry, std::abs(planar::hessian_U(j, gl).u22 -
                                                        0.5 * (1.0 - s) * (1.0 - 3.0 * s)));
                     }
                     ok = ok && convex == (s <= 1.0 / 3.0) && entry <= 1e-12;
                     rows.push_back({{"R_squared", s}, {"convex", convex}, {"U22_defect", entry}});
                   }
                   d["gl_circle_planar"] = rows;
                   return ok;
                 });
}

CheckResult green_monotonicity_check() {
  return guarded(9, "green_monotonicity", "boundary identity and monotone profiles", [](json& d) {
    const Potential gl = make_potential("ginzburg_landau", {{"m", 2}});
    const Potential dw = make_potential("double_well");
    const planar::DiskRule rule{64, 256};
    const auto circle = catalog_make("gl_circle_planar", {{"R", 0.5}});
    const auto front = catalog_make("tanh_planar");
    const auto tilted = catalog_make("tanh_planar", {{"angle", 0.4}});
    const auto g1 = planar::green_boundary_identity(circle.source(), gl, {0.0, 0.0}, 1.0, rule);
    const auto g2 = planar::green_boundary_identity(front.source(), dw, {0.0, 0.0}, 2.0, rule);
    const auto g3 = planar::green_boundary_identity(tilted.source(), dw, {0.3, -0.2}, 2.0, rule);
    d["green"] = {g1.to_json(), g2.to_json(), g3.to_json()};
    bool ok = g1.defect <= 1e-6 && g2.defect <= 1e-6 && g3.defect <= 1e-6;

    std::vector<double> radii;
    for (int k = 1; k <= 8; ++k) radii.push_back(0.5 * k);
    const auto w_prof = planar::monotonicity_profile(planar::potential_density(front.source(), dw),
                                                     {0.0, 0.0}, radii, rule);
    JetSource quadratic = [](std::span<const double> x) {
      Jet2 j(2, 1);
      j.x.assign(x.begin(), x.end());
      j.u[0] = x[0] * x[0] + x[1] * x[1];
      j.Du(0, 0) = 2 * x[0];
      j.Du(0, 1) = 2 * x[1];
      j.D2u(0, 0, 0) = 2.0;
      j.D2u(0, 1, 1) = 2.0;
      return j;
    };
    const auto v_prof = planar::monotonicity_profile(planar::laplacian_density(quadratic),
                                                     {0.0, 0.0}, radii, rule);
    double linear = 0.0;
    for (std::size_t k = 0; k < radii.size(); ++k) {
      const double target = 4.0 * std::numbers::pi * radii[k];
      linear = std::max(linear, std::abs(v_prof.values[k] - target) / target);
    }
    d["W_profile"] = w_prof.to_json();
    d["V_profile_relative_defect"] = linear;
    return ok && w_prof.monotone && v_prof.monotone && linear <= 1e-12;
  });
}

SuiteResult run() {
  SuiteResult s;
  s.checks.push_back(counterexample_check());
  s.checks.push_back(hamiltonian_family_check());
  s.checks.push_back(gl_sharpness_check());
  s.checks.push_back(ode_bound_family_check());
  s.checks.push_back(derived_constants_check());
  s.checks.push_back(convexity_threshold_check());
  s.checks.push_back(planar_identities_check());
  s.checks.push_back(convexity_dichotomy_check());
  s.checks.push_back(green_monotonicity_check());
  return s;
}

}  // namespace gradlab::suite
