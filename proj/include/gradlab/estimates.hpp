#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gradlab/dynamics.hpp"
#include "gradlab/jet.hpp"
#include "gradlab/potentials.hpp"
#include "gradlab/report.hpp"
#include "gradlab/sampling.hpp"

namespace gradlab::estimates {

class EstimateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A hypothesis of the inequality being checked fails on the input.
class HypothesisError : public EstimateError {
 public:
  using EstimateError::EstimateError;
};

// ---- pointwise quantities -------------------------------------------------

/// 1/2 |grad u|^2 - W(u); positive means the Modica bound fails here.
double modica_defect(const Jet2& jet, const Potential& p);

/// 1/2 (1 - |u|^2) - 1/2 |grad u|^2
double gl_pointwise_bound(const Jet2& jet);

/// Jets of a source at every point of a set.
std::vector<Jet2> jets_at(const JetSource& field, const PointSet& points);

/// n = 1 jets along an orbit: u, u' = v, u'' = grad W(u).
std::vector<Jet2> trajectory_jets(const Trajectory& tr, const Potential& p);

/// Worst Modica margin W - 1/2 |grad u|^2 over jets.
DefectReport modica_check(std::span<const Jet2> jets, const Potential& p, double tol = 1e-7);

/// Worst margin of 1/2 |grad u|^2 <= 1/2 (1 - |u|^2).
DefectReport gl_bound_check(std::span<const Jet2> jets, double tol = 1e-7);

// ---- barrier functions ------------------------------------------------------

/// rho_eps: eps for t <= 0, t for t >= 2 eps, flat smooth blend between;
/// phi_eps(s) = integral_0^s rho_eps(6t + 1) dt; the limit phi is
/// 3 s^2 + s for s >= -1/6 and -1/12 below.
class PhiBarrier {
 public:
  explicit PhiBarrier(double eps);

  double eps() const { return eps_; }
  double rho(double t) const;
  double rho_slope(double t) const;
  double phi(double s) const;
  double phi_slope(double s) const { return rho(6.0 * s + 1.0); }
  double phi_curvature(double s) const { return 6.0 * rho_slope(6.0 * s + 1.0); }
  static double limit(double s);

  /// max |phi_eps - phi| on `count` + 1 equispaced points of [-1/2, 0].
  double sup_gap(int count = 2000) const;

 private:
  double antiderivative(double t) const;  // integral_0^t rho_eps

  double eps_;
  double ramp_moment_;  // integral_0^1 of the ramp integral
};

PhiBarrier build_phi(double eps);

// ---- differential inequalities ---------------------------------------------

enum class PVariant { scalar_P, theorem0_P, gl_P, ode_phi_P };

std::string to_string(PVariant v);
PVariant parse_variant(const std::string& name);

/// D, A, M of the diagonal system D Lap u + (1 - <Au,u>) u = 0 and the
/// constants derived from them.
struct Theorem0Config {
  Eigen::VectorXd nu;
  Eigen::MatrixXd A;
  double M = 1.0;
  double a = 0.0;        // operator norm of A
  double c = 0.0;        // lambda_min of the symmetric part of A
  double lambda = 0.0;   // smallest multiplier found on the sample of |v|^2 <= M
  bool gradient = false; // A + A^T = mu D^{-1} for some mu
  std::size_t samples = 0;

  int m() const { return static_cast<int>(nu.size()); }
  /// A D^{-1} + D^{-1} A
  Eigen::MatrixXd K() const;
};

/// Validates the two hypotheses by eigenvalue checks (throws
/// HypothesisError) and computes a, c and lambda by sampling.
Theorem0Config make_theorem0_config(const Eigen::VectorXd& nu, const Eigen::MatrixXd& A,
                                    double M = 1.0, int samples = 10000);

struct ResidualConfig {
  double h = 1e-3;                          // step of the finite differences of P
  const Theorem0Config* theorem0 = nullptr; // theorem0_P
  const PhiBarrier* phi = nullptr;          // ode_phi_P
};

/// LHS - RHS of the differential inequality for P at x, with P evaluated at
/// x and x +- h e_i from the field's jets:
///   scalar_P   |grad u|^2 Lap P - 1/2 |grad P|^2 - 2 W'(u) grad u . grad P
///   theorem0_P Lap P - B - <K u, u> P
///   gl_P       Lap P - B - 2 |u|^2 P
///   ode_phi_P  P'' - 2 phi'(Q(u)) P
double pde_inequality_residual(PVariant variant, const JetSource& field,
                               std::span<const double> x, const Potential& p,
                               const ResidualConfig& cfg);

/// ode_phi_P along an orbit, P'' by second differences of the sampled P.
DefectReport ode_phi_residuals(const Trajectory& tr, const Potential& p, const PhiBarrier& phi,
                               double tol = 1e-7);

// ---- theorem checks ---------------------------------------------------------

/// P <= 0 with P = sum nu_j/2 |grad u^j|^2 + lambda/2 (<Au,u> - 1); the
/// confinement margin 1 - <Au,u> goes to constants. Throws EstimateError
/// when the jets do not solve the system within `solution_tol`.
DefectReport theorem0_check(const Theorem0Config& cfg, std::span<const Jet2> jets,
                            double tol = 1e-7, double solution_tol = 1e-5);

struct Theorem1Constants {
  double R = 0.0;
  double M = 0.0;
  double mu = 0.0;
  double kappa = 0.0;
  double C() const { return 0.5 * (kappa + mu); }
};

/// Constants from sampling: the ball condition on |u| in (R, R + 1] (throws
/// HypothesisError), mu over |u|^2 <= M, kappa over |u| < R.
Theorem1Constants theorem1_constants(const Potential& p, double R, double M,
                                     int samples = 10000);

/// 1/2 |grad u|^2 <= C (R^2 - |u|^2) over jets; confinement R^2 - |u|^2 in constants.
DefectReport theorem1_check(const Potential& p, std::span<const Jet2> jets, double R, double M,
                            double tol = 1e-7, Theorem1Constants* out = nullptr);

struct Theorem3Config {
  double threshold = 0.0;
  double eps = 0.0;        // inf of W off the convexity region
  double S = 0.0;          // sup |grad u|^2 where u leaves the region
  int n = 1;
  double search_radius = 0.0;
  bool usable() const { return eps > 0.0 && S > 0.0 && S < 2.0 * eps / n; }
};

/// inf of W over {lambda_min(D^2 W) < threshold} within |u| <= radius:
/// ray sampling refined by bisection at each region crossing.
double convexity_complement_inf(const Potential& p, double threshold, double radius,
                                int rays = 64, int steps = 4000);

/// (eps/S) |grad u|^2 <= W over jets. Vacuous (with a note in constants)
/// when the image stays in the convexity region or S = 0, or when S >= 2 eps/n.
DefectReport theorem3_check(const Potential& p, std::span<const Jet2> jets,
                            double threshold = 0.0, double search_radius = 3.0,
                            double tol = 1e-7, Theorem3Config* out = nullptr);

/// <grad W(u), r> > 0 for samples beyond an edge (outer normal r) of the
/// convex polygon spanned by the vertices of W = prod |u - a_i|^2.
DefectReport polygon_confinement_check(const std::vector<std::vector<double>>& vertices,
                                       const PointSet& samples, double tol = 1e-7);

/// Pointwise two-branch bound on an orbit of the Ginzburg-Landau ODE, the
/// bound 1/12 on the Hamiltonian, the refined bound when sup |u|^2 > 2/3,
/// and the lower envelope from the circular orbits and the heteroclinic.
DefectReport ode_bound_check(const Trajectory& tr, const Potential& p, double tol = 1e-7);

/// Empirical max of 1/2 |u'|^2 at |u|^2 = s over circular orbits and the
/// heteroclinic, minus the lower bound, for each s.
DefectReport lower_bound_envelope(std::span<const double> s_values, double dt = 1e-3,
                                  double tol = 1e-7);

/// At each jet, bounds of the three estimates for the Ginzburg-Landau system:
/// 1/2 (1 - |u|^2) <= C (1 - |u|^2) <= lambda/2 (1 - |u|^2). Margin is the
/// smaller of the two gaps.
DefectReport bound_ordering(std::span<const Jet2> jets, double C, double lambda,
                            double tol = 1e-12);

}  // namespace gradlab::estimates
