#pragma once

// A smooth planar double-well potential with a periodic orbit through both
// wells a+- = (+-2, 0). Along the orbit 1/2 |u'|^2 - W(u) = 1/8, so the
// orbit touches the zero set of W without being constant.

#include <array>
#include <memory>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "gradlab/dynamics.hpp"
#include "gradlab/potentials.hpp"
#include "gradlab/report.hpp"
#include "gradlab/smooth.hpp"

namespace gradlab::counterexample {

class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Vec2 = std::array<double, 2>;

/// Nondecreasing plateau map: identity on [0, 1/4], 1/2 on [3/4, inf),
/// alpha - R(2 alpha - 1/2) / 2 in between (R the ramp integral).
struct RhoSpec {
  double sharpness = 1.0;

  /// rho and its first three derivatives at alpha.
  smooth::Taylor3 eval(double alpha) const;
  double value(double alpha) const;
  double slope(double alpha) const;
};

RhoSpec build_rho(double sharpness = 1.0);

/// Level of W on the plateau that makes the Hamiltonian 1/8 everywhere.
double lambda_from_hamiltonian();

/// u_2'' = 4 lambda rho'(u_2^2) u_2, u_2(0) = 0, u_2'(0) = 1/2, by RK4.
struct SegmentSolution {
  double lambda = 0.0;
  double dt = 0.0;
  double t1 = 0.0;  // u_2 = sqrt(3/4)
  double t2 = 0.0;  // u_2 = 1
  double drift = 0.0;
  RhoSpec rho;
  std::vector<double> y;
  std::vector<double> v;

  /// (u_2, u_2') at 0 <= x <= t2 by one RK4 substep from the nearest sample.
  std::array<double, 2> state(double x) const;
};

SegmentSolution solve_segment(double lambda, double dt = 1e-3,
                              const RhoSpec& rho = build_rho());

/// Upper arc of the closed curve, from (2, 1) to (-2, 1), by arclength s.
/// Tangent angle theta(s) = pi/2 + pi S(s / L) for the flat step S.
class CurveSpec {
 public:
  struct Frame {
    Vec2 point;
    Vec2 tangent;
    Vec2 normal;  // inward (left) normal
    double theta;
    std::array<double, 3> curvature;  // kappa, kappa', kappa''
  };

  explicit CurveSpec(double sharpness = 1.0, int knots = 512);

  double sharpness() const { return sharpness_; }
  double length() const { return length_; }
  double max_curvature() const { return max_curvature_; }
  double closure_defect() const { return closure_defect_; }
  int knots() const { return static_cast<int>(knot_points_.size()) - 1; }

  Frame frame(double s) const;
  Vec2 point(double s) const;

  /// Foot point of w on the arc: s with (gamma(s) - w) . t(s) = 0 and the
  /// signed normal offset mu = (w - gamma(s)) . n(s). Returns false if the
  /// foot point would leave [0, L].
  bool project(const Vec2& w, double& s, double& mu) const;

 private:
  Vec2 integrate_from_knot(double s) const;

  double sharpness_;
  double length_ = 0.0;
  double max_curvature_ = 0.0;
  double closure_defect_ = 0.0;
  std::vector<Vec2> knot_points_;
};

CurveSpec build_curve(double sharpness = 1.0);

/// W(gamma(s) + mu n(s)) = lambda + mu kappa(s) b(mu), with b = 1 for
/// |mu| <= width and a flat cutoff to 0 at |mu| = 2 width.
class TubePotential {
 public:
  TubePotential(std::shared_ptr<const CurveSpec> curve, double lambda, double width);

  double lambda() const { return lambda_; }
  double width() const { return width_; }
  const CurveSpec& curve() const { return *curve_; }

  /// Evaluates at w (upper half plane). Returns false outside the tube.
  bool evaluate(const Vec2& w, double& W, Vec2& grad, std::array<double, 4>& hess) const;

 private:
  std::shared_ptr<const CurveSpec> curve_;
  double lambda_;
  double width_;
};

/// Global potential on R^2: square patches 2 lambda rho(|u - a+-|^2) on
/// |u_1 -+ 2| <= 1, |u_2| <= 1, the tube around the upper arc and its mirror
/// image, and the constant lambda elsewhere.
class CounterexampleModel final : public PotentialModel {
 public:
  CounterexampleModel(RhoSpec rho, std::shared_ptr<const CurveSpec> curve, double lambda,
                      double tube_width);

  int dim() const override { return 2; }
  void evaluate(std::span<const double> u, double* W, std::span<double> grad,
                std::span<double> hess) const override;
  std::vector<std::vector<double>> zeros() const override { return {{2.0, 0.0}, {-2.0, 0.0}}; }

  const TubePotential& tube() const { return tube_; }
  const RhoSpec& rho() const { return rho_; }

 private:
  RhoSpec rho_;
  double lambda_;
  TubePotential tube_;
};

double tube_width_for(double lambda, const CurveSpec& curve);

/// The assembled periodic solution and its potential.
struct PeriodicConnection {
  double lambda = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double T = 0.0;
  double tube_width = 0.0;
  RhoSpec rho;
  std::shared_ptr<const CurveSpec> curve;
  SegmentSolution segment;
  Potential potential;

  /// (u(x), u'(x)) for any real x.
  PhasePoint state(double x) const;
  /// Uniform samples of one period [0, T] (count + 1 points).
  Trajectory sample(std::size_t count) const;
};

PeriodicConnection assemble(std::shared_ptr<const CurveSpec> curve, const RhoSpec& rho,
                            double lambda, double dt = 1e-3);

/// Build everything with default choices: rho, lambda = 3/8, the curve with
/// the given sharpness.
PeriodicConnection build(double sharpness = 1.0, double dt = 1e-3);

struct VerifyOptions {
  std::size_t samples = 20000;
  double fd_step = 2.5e-4;
  double tol = 1e-7;
};

/// Modica defect W - 1/2 |u'|^2 along the orbit (violated by 1/8), with the
/// construction diagnostics in `constants`.
DefectReport verify_counterexample(const PeriodicConnection& pc,
                                   const VerifyOptions& opt = VerifyOptions{});

/// {lambda, t1, t2, t3, T, residual_max, modica_defect, liouville_violated, shape}
nlohmann::json construction_report(const PeriodicConnection& pc, const DefectReport& verified);

/// Catalog hook: params {sharpness}.
Potential make_potential(const nlohmann::json& params);

}  // namespace gradlab::counterexample
