#pragma once

#include <cstdint>
#include <vector>

namespace gradlab {

/// Deterministic point sets. Points are stored flat, `dim` reals per point.
struct PointSet {
  int dim = 0;
  std::vector<double> coords;

  std::size_t size() const { return dim == 0 ? 0 : coords.size() / dim; }
  const double* point(std::size_t k) const { return coords.data() + k * dim; }
  void push(const double* p) { coords.insert(coords.end(), p, p + dim); }
};

/// About `count` points filling the closed ball |u| <= radius in R^dim.
/// dim 1: uniform grid; dim 2: polar grid with radii clustered toward the
/// boundary (so sup/inf of boundary-limited quantities are resolved);
/// dim >= 3: seeded Gaussian directions times clustered radii.
PointSet ball_samples(int dim, double radius, int count, std::uint64_t seed = 12345);

/// Points on the sphere |u| = radius spanned by the first two coordinates
/// (equispaced angles); for dim 1 the two points +-radius.
PointSet circle_samples(int dim, double radius, int count);

/// Points in the spherical shell r_in < |u| <= r_out.
PointSet shell_samples(int dim, double r_in, double r_out, int count,
                       std::uint64_t seed = 12345);

/// Unit directions: dim 1 -> {+1, -1}; dim 2 -> equispaced; dim >= 3 seeded.
PointSet directions(int dim, int count, std::uint64_t seed = 12345);

}  // namespace gradlab
