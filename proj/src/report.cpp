#include "gradlab/report.hpp"

#include <cmath>

namespace gradlab {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds:
      return "holds";
    case Verdict::violated:
      return "violated";
    case Verdict::vacuous:
      return "vacuous";
  }
  return "unknown";
}

void DefectReport::add(double margin, std::span<const double> point) {
  ++samples;
  if (std::isnan(margin)) margin = -std::numeric_limits<double>::infinity();
  if (margin < worst_margin || worst_point.empty()) {
    if (margin < worst_margin) worst_margin = margin;
    worst_point.assign(point.begin(), point.end());
  }
}

void DefectReport::merge(const DefectReport& other) {
  samples += other.samples;
  if (other.worst_margin < worst_margin) {
    worst_margin = other.worst_margin;
    worst_point = other.worst_point;
  }
}

DefectReport& DefectReport::finalize() {
  if (samples == 0) {
    verdict = Verdict::vacuous;
  } else {
    verdict = worst_margin >= -tol ? Verdict::holds : Verdict::violated;
  }
  return *this;
}

nlohmann::json DefectReport::to_json() const {
  nlohmann::json j;
  j["id"] = id;
  j["samples"] = samples;
  j["worst_margin"] = samples ? nlohmann::json(worst_margin) : nlohmann::json(nullptr);
  j["worst_point"] = worst_point;
  j["verdict"] = to_string(verdict);
  j["tol"] = tol;
  j["constants"] = constants;
  return j;
}

}  // namespace gradlab
