#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "gradlab/fields.hpp"
#include "gradlab/jet.hpp"
#include "gradlab/potentials.hpp"

namespace gradlab::planar {

class PlanarError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Point2 = std::array<double, 2>;

/// T_ij = u_{x_i} . u_{x_j} - delta_ij (1/2 |grad u|^2 + W(u)).
struct StressTensor {
  Eigen::MatrixXd T;
  Eigen::MatrixXd isotropic;  // -(1/2 |grad u|^2 + W) I
  Eigen::MatrixXd gram;       // (u_{x_i} . u_{x_j})

  double trace() const { return T.trace(); }
};

StressTensor stress_tensor(const Jet2& jet, const Potential& p);

/// Hessian of the auxiliary function U of a planar solution.
struct UHessian {
  double u11 = 0.0;
  double u12 = 0.0;
  double u22 = 0.0;

  double trace() const { return u11 + u22; }
  double det() const { return u11 * u22 - u12 * u12; }
  Eigen::Matrix2d matrix() const {
    Eigen::Matrix2d A;
    A << u11, u12, u12, u22;
    return A;
  }
};

/// Throws PlanarError unless n = 2.
UHessian hessian_U(const Jet2& jet, const Potential& p);

struct Convexity {
  double det = 0.0;     // det D^2 U
  double margin = 0.0;  // 4 W^2 - (|u_1|^2 - |u_2|^2)^2 - 4 (u_1 . u_2)^2
  /// Equality cases (equipartition, conformal) sit at margin 0 up to roundoff.
  bool convex(double tol = 1e-12) const { return margin >= -tol; }
  /// The two numbers are the same polynomial; they must agree to roundoff.
  bool consistent(double tol = 1e-12) const;
};

Convexity convexity_status(const Jet2& jet, const Potential& p);

/// W(u) = 0 and D^2 U = 0 within tol: u is conformal with vanishing Hopf
/// differential.
bool is_conformal(const Jet2& jet, const Potential& p, double tol = 1e-12);

// ---- grid checks -------------------------------------------------------------

/// Throws PlanarError when the discrete residual of the field exceeds gate.
/// A non-positive gate disables the check.
void require_solution(const GridField& field, const Potential& p, double gate);

/// sup over nodes at distance >= 2 of |div T|, with T built from second-order
/// FD jets and differentiated by central differences.
double divergence_sup(const GridField& field, const Potential& p, double gate = 1e-5);

struct RefinementPair {
  double coarse = 0.0;
  double fine = 0.0;
  double ratio() const { return coarse / fine; }
};

/// divergence_sup on a field and on its refinement.
RefinementPair divergence_residual(const GridField& coarse, const GridField& fine,
                                   const Potential& p, double gate = 1e-5);

/// sup of the two compatibility relations d2 U11 = d1 U12 and d1 U22 = d2 U12
/// by central differences of the FD Hessian entries.
double compatibility_residual(const GridField& field, const Potential& p, double gate = 1e-5);

/// U on the nodes at distance >= 1 of the source grid.
struct UField {
  GridField U;
  std::array<int, 2> gauge{};  // node index in the source grid
  double path_defect = 0.0;    // max |U(path 1) - U(path 2)|

  /// sup |Lap_h U - 4 W(u)| over nodes of U away from its own boundary.
  double laplacian_defect(const GridField& field, const Potential& p) const;
};

/// U from its Hessian by trapezoid integration along grid lines: gradient
/// first, then values; path 1 runs along axis 0 then axis 1, path 2 the other
/// way round, and U is their mean. Gauge U = 0, grad U = 0 at the node x0.
/// Throws if the path defect exceeds 10 fd_tol.
UField reconstruct_U(const GridField& field, const Potential& p, std::span<const double> x0,
                     double gate = 1e-5, double fd_tol = 1e-3);

// ---- quadrature ----------------------------------------------------------------

using Density = std::function<double(std::span<const double>)>;

struct DiskRule {
  int radial_order = 64;
  int angular_nodes = 256;
};

/// Polar rule over B(center, r): Gauss-Legendre in radius weighted by r,
/// trapezoid in angle.
double disk_integral(const Density& f, Point2 center, double r, DiskRule rule = {});

struct DiskEstimate {
  double value = 0.0;
  double error = 0.0;  // |full rule - half rule|
};

DiskEstimate disk_integral_estimate(const Density& f, Point2 center, double r,
                                    DiskRule rule = {});

struct GreenIdentity {
  double lhs = 0.0;  // integral over the disk of 4 W
  double rhs = 0.0;  // R times boundary integral of |u_tau|^2 - |u_nu|^2 + 2 W
  double defect = 0.0;
  DiskRule rule;

  nlohmann::json to_json() const;
};

struct Box {
  Point2 lo{-1e300, -1e300};
  Point2 hi{1e300, 1e300};
};

/// The jets are taken as exact; `gate` bounds |Lap u - grad W(u)| on the
/// boundary nodes (non-positive disables the check).
GreenIdentity green_boundary_identity(const JetSource& field, const Potential& p,
                                      Point2 center, double R, DiskRule rule = {},
                                      Box domain = {}, double gate = 1e-5);

// ---- monotonicity ------------------------------------------------------------------

enum class DensityKind { potential_W, laplacian_of, grad_sq_harmonic };

std::string to_string(DensityKind k);

struct NamedDensity {
  DensityKind kind;
  Density f;
};

NamedDensity potential_density(JetSource field, Potential p);
/// Lap V for a scalar field V.
NamedDensity laplacian_density(JetSource V);
/// |grad u|^2 of a harmonic map.
NamedDensity harmonic_density(JetSource u);

struct MonotoneProfile {
  DensityKind density = DensityKind::potential_W;
  Point2 center{};
  std::vector<double> radii;
  std::vector<double> values;  // (1/r) integral over B(center, r)
  std::vector<double> errors;
  double worst_step = 0.0;     // min over i of M(r_{i+1}) - M(r_i) + 2 max(err)
  bool monotone = true;

  void write_csv(const std::filesystem::path& path) const;
  nlohmann::json to_json() const;
};

/// Radii must be positive and strictly increasing.
MonotoneProfile monotonicity_profile(const NamedDensity& density, Point2 center,
                                     std::vector<double> radii, DiskRule rule = {});

}  // namespace gradlab::planar
