#include "gradlab/sampling.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace gradlab {

namespace {

// r_k = radius * (1 - (1 - k/N)^2), k = 0..N: dense near the boundary.
std::vector<double> clustered_radii(double radius, int n_radii, bool include_outer) {
  std::vector<double> r;
  const int last = include_outer ? n_radii : n_radii - 1;
  for (int k = 0; k <= last; ++k) {
    const double s = 1.0 - static_cast<double>(k) / n_radii;
    r.push_back(radius * (1.0 - s * s));
  }
  return r;
}

}  // namespace

PointSet directions(int dim, int count, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("directions: dim must be >= 1");
  PointSet out;
  out.dim = dim;
  if (dim == 1) {
    const double a = 1.0;
    const double b = -1.0;
    out.push(&a);
    out.push(&b);
    return out;
  }
  std::vector<double> p(dim, 0.0);
  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double th = 2.0 * std::numbers::pi * k / count;
      p[0] = std::cos(th);
      p[1] = std::sin(th);
      out.push(p.data());
    }
    return out;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 0; k < count; ++k) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (double& v : p) {
        v = normal(rng);
        norm += v * v;
      }
    } while (norm < 1e-12);
    norm = std::sqrt(norm);
    for (double& v : p) v /= norm;
    out.push(p.data());
  }
  return out;
}

PointSet ball_samples(int dim, double radius, int count, std::uint64_t seed) {
  PointSet out;
  out.dim = dim;
  if (dim == 1) {
    const int n = std::max(count, 2);
    for (int k = 0; k < n; ++k) {
      const double v = -radius + 2.0 * radius * k / (n - 1);
      out.push(&v);
    }
    return out;
  }
  const int n_dir = dim == 2 ? std::max(8, static_cast<int>(std::sqrt(count)))
                             : std::max(16, count / 50);
  const int n_rad = std::max(2, count / n_dir);
  const PointSet dirs = directions(dim, n_dir, seed);
  std::vector<double> origin(dim, 0.0);
  out.push(origin.data());
  std::vector<double> p(dim);
  for (double r : clustered_radii(radius, n_rad, true)) {
    if (r == 0.0) continue;
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      for (int c = 0; c < dim; ++c) p[c] = r * dirs.point(d)[c];
      out.push(p.data());
    }
  }
  return out;
}

PointSet circle_samples(int dim, double radius, int count) {
  PointSet out;
  out.dim = dim;
  if (dim == 1) {
    const double a = radius;
    const double b = -radius;
    out.push(&a);
    out.push(&b);
    return out;
  }
  std::vector<double> p(dim, 0.0);
  for (int k = 0; k < count; ++k) {
    const double th = 2.0 * std::numbers::pi * k / count;
    p[0] = radius * std::cos(th);
    p[1] = radius * std::sin(th);
    out.push(p.data());
  }
  return out;
}

PointSet shell_samples(int dim, double r_in, double r_out, int count,
                       std::uint64_t seed) {
  PointSet out;
  out.dim = dim;
  const int n_dir = dim == 1 ? 2 : (dim == 2 ? std::max(8, static_cast<int>(std::sqrt(count)))
                                             : std::max(16, count / 50));
  const int n_rad = std::max(2, count / n_dir);
  const PointSet dirs = directions(dim, n_dir, seed);
  std::vector<double> p(dim);
  for (int k = 1; k <= n_rad; ++k) {
    const double r = r_in + (r_out - r_in) * k / n_rad;
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      for (int c = 0; c < dim; ++c) p[c] = r * dirs.point(d)[c];
      out.push(p.data());
    }
  }
  return out;
}

}  // namespace gradlab
