#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gradlab/jet.hpp"

namespace gradlab {

class FieldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Candidate solution with an analytic 2-jet. Immutable.
class ClosedFormField {
 public:
  using Evaluator = std::function<void(std::span<const double>, Jet2&)>;

  ClosedFormField(std::string name, nlohmann::json params, int n, int m,
                  Evaluator eval);

  const std::string& name() const { return name_; }
  const nlohmann::json& params() const { return params_; }
  int n() const { return n_; }
  int m() const { return m_; }

  Jet2 jet(std::span<const double> x) const;
  std::vector<double> value(std::span<const double> x) const;
  JetSource source() const;

 private:
  std::string name_;
  nlohmann::json params_;
  int n_;
  int m_;
  Evaluator eval_;
};

/// Catalog ids: constant, linear, gl_circle, gl_circle_planar, tanh_profile,
/// tanh_planar {angle}, harmonic_linear_map {scale, angle}, product_saddle.
ClosedFormField catalog_make(const std::string& name,
                             const nlohmann::json& params = nlohmann::json::object());

std::vector<std::string> catalog_names();

/// Central-difference jet of a closed form from point evaluations only
/// (used to cross-check the analytic jets).
Jet2 pointwise_fd_jet(const ClosedFormField& f, std::span<const double> x, double h);

enum class StencilOrder { second = 2, fourth = 4 };

/// Nodal samples of u on a uniform rectangular grid (n = 1 or 2).
/// Node (i0, i1) has flat index i0 * extents[1] + i1 (first axis slowest).
class GridField {
 public:
  GridField(int n, int m, std::vector<double> origin, std::vector<double> h,
            std::vector<int> extents, std::vector<double> values);

  /// Zero-initialised grid.
  GridField(int n, int m, std::vector<double> origin, std::vector<double> h,
            std::vector<int> extents);

  int n() const { return n_; }
  int m() const { return m_; }
  const std::vector<double>& origin() const { return origin_; }
  const std::vector<double>& h() const { return h_; }
  const std::vector<int>& extents() const { return extents_; }
  std::size_t node_count() const { return values_.size() / m_; }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  std::size_t flat(std::span<const int> idx) const;
  std::array<int, 2> multi(std::size_t flat) const;
  std::vector<double> node_position(std::span<const int> idx) const;

  double at(std::span<const int> idx, int comp) const { return values_[flat(idx) * m_ + comp]; }
  double& at(std::span<const int> idx, int comp) { return values_[flat(idx) * m_ + comp]; }

  /// Distance (in nodes) from the nearest face.
  int boundary_distance(std::span<const int> idx) const;
  bool is_boundary(std::span<const int> idx) const { return boundary_distance(idx) == 0; }

  /// Finite-difference jet at a node. Needs distance >= 1 (second order) or
  /// >= 2 (fourth order) from every face.
  Jet2 fd_jet(std::span<const int> idx, StencilOrder order = StencilOrder::second) const;

  /// Jet at a point that must coincide with a node (no interpolation).
  Jet2 jet(std::span<const double> x, StencilOrder order = StencilOrder::second) const;

  /// Node index of x, or throws if x is not a node.
  std::vector<int> node_of(std::span<const double> x) const;

  JetSource source(StencilOrder order = StencilOrder::second) const;

  /// Jets at all nodes with boundary_distance >= min_distance.
  std::vector<Jet2> interior_jets(int min_distance = 1,
                                  StencilOrder order = StencilOrder::second) const;

 private:
  int n_;
  int m_;
  std::vector<double> origin_;
  std::vector<double> h_;
  std::vector<int> extents_;
  std::vector<double> values_;
};

/// Sample a closed form at the nodes of a grid.
GridField sample_grid(const ClosedFormField& f, std::vector<double> origin,
                      std::vector<double> h, std::vector<int> extents);

/// Text format: header `gridfield n m h... extents...`, then one line per node
/// (row-major) with m values. Origin and provenance go to `<path>.json`.
void write_gridfield(const GridField& g, const std::filesystem::path& path,
                     const nlohmann::json& extra_meta = nlohmann::json::object());
GridField read_gridfield(const std::filesystem::path& path);

}  // namespace gradlab
