#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "gradlab/sampling.hpp"

namespace gradlab {

class PotentialError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Implementation side of a potential W: R^m -> R. Outputs that are not
/// wanted are passed as nullptr / empty spans. `hess` is m*m row-major.
class PotentialModel {
 public:
  virtual ~PotentialModel() = default;
  virtual int dim() const = 0;
  virtual void evaluate(std::span<const double> u, double* W, std::span<double> grad,
                        std::span<double> hess) const = 0;
  virtual std::vector<std::vector<double>> zeros() const = 0;
};

struct PotentialEval {
  double W = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

/// A catalog potential: immutable, cheap to copy, safe to share across threads.
class Potential {
 public:
  Potential(std::string id, nlohmann::json params, std::shared_ptr<const PotentialModel> model);

  const std::string& id() const { return id_; }
  const nlohmann::json& params() const { return params_; }
  int m() const { return model_->dim(); }
  std::vector<std::vector<double>> zeros() const { return model_->zeros(); }

  double value(std::span<const double> u) const;
  void gradient(std::span<const double> u, std::span<double> out) const;
  std::vector<double> gradient(std::span<const double> u) const;
  Eigen::MatrixXd hessian(std::span<const double> u) const;

  /// Consistent (W, grad W, D^2 W) triple. Throws on dimension mismatch.
  PotentialEval eval(std::span<const double> u) const;

  const PotentialModel& model() const { return *model_; }

 private:
  void check_dim(std::span<const double> u) const;

  std::string id_;
  nlohmann::json params_;
  std::shared_ptr<const PotentialModel> model_;
};

/// Catalog ids: double_well, ginzburg_landau {m}, n_well {N}, polygon
/// {vertices}, quadratic {m}, zero {m}, counterexample {sharpness}.
Potential make_potential(const std::string& id,
                         const nlohmann::json& params = nlohmann::json::object());
std::vector<std::string> potential_names();

/// Worse of the relative errors grad-vs-FD(W) and hess-vs-FD(grad).
double fd_consistency(const Potential& p, std::span<const double> u, double h);

struct RadialParams {
  double R = 0.0;
  double lambda = 0.0;  // W on the circle |u| = R
  double mu = 0.0;      // grad W(u) = -mu u on the circle
};

struct RadialProbe {
  bool radial = false;      // W constant and grad W = -mu u with constant mu
  bool degenerate = false;  // radial but mu <= tol
  RadialParams params;
  double worst_deviation = 0.0;
};

/// Probe |u| = R along 64 equispaced directions in the (u_1, u_2) plane.
RadialProbe radial_parameters(const Potential& p, double R, double tol = 1e-9);

double min_hessian_eigenvalue(const Potential& p, std::span<const double> u);

/// lambda_min(D^2 W) at each sample.
std::vector<double> convexity_region_probe(const Potential& p, const PointSet& samples);

}  // namespace gradlab
