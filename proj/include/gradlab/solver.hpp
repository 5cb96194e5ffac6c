#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "gradlab/fields.hpp"
#include "gradlab/kernels.hpp"
#include "gradlab/potentials.hpp"

namespace gradlab::solver {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Energy rose or values blew up; `diagnostics` says where.
class DivergenceError : public SolverError {
 public:
  DivergenceError(const std::string& what, nlohmann::json diagnostics)
      : SolverError(what), diagnostics_(std::move(diagnostics)) {}
  const nlohmann::json& diagnostics() const { return diagnostics_; }

 private:
  nlohmann::json diagnostics_;
};

struct RelaxConfig {
  std::vector<double> origin;
  std::vector<double> h;
  std::vector<int> extents;
  /// Dirichlet trace; when absent the boundary values of init are kept.
  std::optional<ClosedFormField> boundary;
  double tau = 0.0;  // 0 picks safety / (sum 2/h_a^2 + L)
  double safety = 0.9;
  double tol = 1e-9;
  std::size_t max_iters = 200000;
  int check_every = 10;  // iterations between residual evaluations
  bool parallel = true;
};

/// grid, boundary {field, params}, tau, safety, tol, max_iters.
RelaxConfig config_from_json(const nlohmann::json& j);

struct RelaxResult {
  GridField field;
  std::size_t iterations = 0;
  double residual = 0.0;
  double tau = 0.0;
  double lipschitz = 0.0;
  bool converged = false;
  std::vector<double> energy;  // one entry per iteration, starting with init

  /// {iters, residual, energy_first, energy_last}
  nlohmann::json log() const;
};

kernels::GridShape shape_of(const GridField& f);

/// Zero interior with the trace of cfg.boundary on the faces.
GridField boundary_start(const RelaxConfig& cfg, int m);

/// Sampled bound on the spectral radius of D^2 W over the box spanned by the
/// field values (slightly enlarged).
double hessian_bound(const Potential& p, const GridField& f);

RelaxResult relax(const Potential& p, const RelaxConfig& cfg, GridField init);

/// sup of |Lap_h u - grad W(u)| over interior nodes.
double residual(const GridField& field, const Potential& p);

/// Trapezoid composite of 1/2 |grad_h u|^2 + W(u).
double energy(const GridField& field, const Potential& p);

}  // namespace gradlab::solver
