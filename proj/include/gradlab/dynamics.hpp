#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "gradlab/potentials.hpp"

namespace gradlab {

struct PhasePoint {
  std::vector<double> u;
  std::vector<double> v;
};

/// Uniform-step orbit of u'' = grad W(u) with its Hamiltonian series.
struct Trajectory {
  int m = 0;
  double dt = 0.0;
  double drift_tolerance = 0.0;
  std::vector<double> t;
  std::vector<PhasePoint> states;
  std::vector<double> H;

  std::size_t size() const { return t.size(); }
  double max_drift() const;
  void write_csv(const std::filesystem::path& path) const;
};

/// Thrown when |u| > 1e6 or a non-finite value shows up; `partial` holds the
/// states up to and including `last_valid`.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(std::size_t last_valid, Trajectory partial);
  std::size_t last_valid() const { return last_valid_; }
  const Trajectory& partial() const { return partial_; }

 private:
  std::size_t last_valid_;
  Trajectory partial_;
};

class DynamicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 1/2 |v|^2 - W(u)
double hamiltonian(const Potential& p, const PhasePoint& s);

/// Position Verlet: half drift, kick, half drift. `drift_tolerance` is
/// recorded on the trajectory and not enforced.
Trajectory integrate(const Potential& p, const PhasePoint& start, double dt, std::size_t steps,
                     double drift_tolerance = 1e-8);

/// Circular orbits R e^{i omega x} of the Ginzburg-Landau ODE in the plane.
struct OrbitFamily {
  double R = 0.0;
  double omega = 0.0;
  double period = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  double H = 0.0;

  PhasePoint start() const;
  /// Exact phase point R e^{i omega x} at x.
  PhasePoint at(double x) const;
};

OrbitFamily orbit_family(double R);

/// The closed-form orbit sampled on a uniform grid (no integration error).
Trajectory sample_exact(const OrbitFamily& f, const Potential& p, double dt, std::size_t steps);

/// Heteroclinic of a scalar potential from the first-order reduction
/// u' = sqrt(2 W(u)), integrated by RK4 from the midpoint in both
/// directions until both ends are within `tol` of the wells.
Trajectory shoot_heteroclinic(const Potential& p, double a_minus, double a_plus, double tol,
                              double dt = 1e-3);

}  // namespace gradlab
