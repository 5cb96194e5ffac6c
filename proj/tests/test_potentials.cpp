#include <doctest.h>

#include <cmath>
#include <random>

#include "gradlab/potentials.hpp"

using namespace gradlab;
using nlohmann::json;

TEST_CASE("Ginzburg-Landau values at the origin and on the unit sphere") {
  for (int m : {1, 2, 3}) {
    const auto p = make_potential("ginzburg_landau", {{"m", m}});
    const std::vector<double> zero(m, 0.0);
    const auto e = p.eval(zero);
    CHECK(e.W == doctest::Approx(0.25));
    CHECK(e.grad.norm() == 0.0);
    std::vector<double> unit(m, 0.0);
    unit[0] = 1.0;
    CHECK(std::abs(p.value(unit)) < 1e-15);
  }
}

TEST_CASE("N-well vanishes at the roots of unity") {
  const auto p = make_potential("n_well", {{"N", 2}});
  CHECK(std::abs(p.value(std::vector<double>{1.0, 0.0})) < 1e-15);
  CHECK(std::abs(p.value(std::vector<double>{-1.0, 0.0})) < 1e-15);
  CHECK(p.value(std::vector<double>{0.0, 0.0}) == doctest::Approx(1.0));
}

TEST_CASE("Ginzburg-Landau radial identities") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 0.8);
  const auto p = make_potential("ginzburg_landau", {{"m", 3}});
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> u{g(rng), g(rng), g(rng)};
    const double s = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    const auto e = p.eval(u);
    const Eigen::Map<const Eigen::VectorXd> uv(u.data(), 3);
    CHECK(std::abs(uv.dot(e.grad) - s * (s - 1.0)) <= 1e-12 * std::max(1.0, s * s));
    CHECK(std::abs(e.grad.squaredNorm() - (s - 1.0) * (s - 1.0) * s) <=
          1e-12 * std::max(1.0, s * s * s));
    CHECK((e.hess - e.hess.transpose()).norm() == 0.0);
  }
}

TEST_CASE("gradients and Hessians match finite differences") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> c(-1.5, 1.5);
  const auto gl = make_potential("ginzburg_landau", {{"m", 2}});
  const auto poly = make_potential("polygon");
  const auto quad = make_potential("quadratic", {{"m", 3}});
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<double> u2{c(rng), c(rng)};
    const std::vector<double> u3{c(rng), c(rng), c(rng)};
    CHECK(fd_consistency(gl, u2, 1e-5) <= 1e-6);
    CHECK(fd_consistency(poly, u2, 1e-5) <= 1e-5);
    CHECK(fd_consistency(quad, u3, 1e-3) <= 1e-10);
  }
}

TEST_CASE("radial parameters of the Ginzburg-Landau potential") {
  const auto p = make_potential("ginzburg_landau", {{"m", 2}});
  const auto probe = radial_parameters(p, 0.5);
  REQUIRE(probe.radial);
  CHECK_FALSE(probe.degenerate);
  CHECK(probe.params.lambda == doctest::Approx(0.140625).epsilon(1e-14));
  CHECK(probe.params.mu == doctest::Approx(0.75).epsilon(1e-14));

  const auto edge = radial_parameters(p, 1.0);
  CHECK(edge.radial);
  CHECK(edge.degenerate);
  CHECK(std::abs(edge.params.lambda) < 1e-12);
  CHECK(std::abs(edge.params.mu) < 1e-12);
}

TEST_CASE("the polygon product is not radial") {
  const auto probe = radial_parameters(make_potential("polygon"), 0.5);
  CHECK_FALSE(probe.radial);
  CHECK(probe.worst_deviation > 1e-3);
}

TEST_CASE("double-well convexity probe") {
  const auto p = make_potential("double_well");
  PointSet s{1, {0.0, 1.0, 1.0 / std::sqrt(3.0)}};
  const auto lam = convexity_region_probe(p, s);
  REQUIRE(lam.size() == 3);
  CHECK(lam[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(lam[1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(lam[2]) < 1e-14);
}

TEST_CASE("catalog zeros, symmetry and nonnegativity") {
  const std::vector<std::pair<std::string, json>> entries{
      {"double_well", json::object()},
      {"ginzburg_landau", {{"m", 2}}},
      {"n_well", {{"N", 3}}},
      {"polygon", json::object()},
      {"quadratic", {{"m", 2}}},
      {"counterexample", json::object()},
  };
  for (const auto& [id, params] : entries) {
    CAPTURE(id);
    const auto p = make_potential(id, params);
    for (const auto& a : p.zeros()) CHECK(std::abs(p.value(a)) <= 1e-14);
    const auto samples = ball_samples(p.m(), 3.0, 2000);
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const std::span<const double> u(samples.point(k), p.m());
      const auto e = p.eval(u);
      CHECK(e.W >= 0.0);
      CHECK((e.hess - e.hess.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("dimension mismatch and unknown ids are rejected") {
  const auto p = make_potential("ginzburg_landau", {{"m", 2}});
  CHECK_THROWS_AS(p.eval(std::vector<double>{1.0, 2.0, 3.0}), PotentialError);
  CHECK_THROWS_AS(make_potential("nope"), PotentialError);
  CHECK_THROWS_AS(make_potential("ginzburg_landau", {{"m", 0}}), PotentialError);
}
