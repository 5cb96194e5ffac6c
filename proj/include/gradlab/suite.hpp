#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gradlab/fields.hpp"

namespace gradlab::suite {

struct CheckResult {
  int criterion = 0;
  std::string id;
  std::string title;
  bool pass = false;
  nlohmann::json detail = nlohmann::json::object();
  double seconds = 0.0;  // wall time; kept out of to_json so reports are reproducible
};

struct SuiteResult {
  std::vector<CheckResult> checks;

  bool pass() const;
  nlohmann::json to_json() const;
};

CheckResult counterexample_check();
CheckResult hamiltonian_family_check();
CheckResult gl_sharpness_check();
CheckResult ode_bound_family_check();
CheckResult derived_constants_check();
CheckResult convexity_threshold_check();
CheckResult planar_identities_check();
CheckResult convexity_dichotomy_check();
CheckResult green_monotonicity_check();

/// Criteria 1 to 9 in order.
SuiteResult run();

/// Converged relaxation of the double well on [-3, 3] x [0, 1] with the trace
/// of the tilted tanh front on the faces, started from the sampled front.
GridField relaxed_front(double h, double angle = 0.4, double tol = 1e-10);

}  // namespace gradlab::suite
