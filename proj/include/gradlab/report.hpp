#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace gradlab {

enum class Verdict { holds, violated, vacuous };

std::string to_string(Verdict v);

/// Worst margin (RHS - LHS) of one inequality over a sample set.
struct DefectReport {
  std::string id;
  std::size_t samples = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::vector<double> worst_point;
  Verdict verdict = Verdict::vacuous;
  double tol = 1e-7;
  nlohmann::json constants = nlohmann::json::object();

  DefectReport() = default;
  DefectReport(std::string id_, double tol_ = 1e-7) : id(std::move(id_)), tol(tol_) {}

  /// Record one sample; `point` is kept when it becomes the worst.
  void add(double margin, std::span<const double> point);
  /// Merge another report's samples (worst point wins, ties keep ours).
  void merge(const DefectReport& other);
  /// Set the verdict from the margins seen so far.
  DefectReport& finalize();

  bool holds() const { return verdict == Verdict::holds; }
  nlohmann::json to_json() const;
};

}  // namespace gradlab
