#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "gradlab/planar.hpp"
#include "gradlab/quadrature.hpp"
#include "gradlab/suite.hpp"

using namespace gradlab;
using namespace gradlab::planar;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

Potential gl2() { return make_potential("ginzburg_landau", {{"m", 2}}); }

GridField gl_grid(double h, double R = 0.5) {
  const int rows = static_cast<int>(std::lround(2.0 / h)) + 1;
  const int cols = static_cast<int>(std::lround(0.4 / h)) + 1;
  return sample_grid(catalog_make("gl_circle_planar", {{"R", R}}), {-1.0, 0.0}, {h, h},
                     {rows, cols});
}

Jet2 random_jet(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> g(0.0, 0.7);
  Jet2 j(2, m);
  for (double& v : j.u) v = g(rng);
  for (double& v : j.du) v = g(rng);
  for (int c = 0; c < m; ++c) {
    for (int i = 0; i < 2; ++i) {
      for (int k = i; k < 2; ++k) {
        j.D2u(c, i, k) = g(rng);
        j.D2u(c, k, i) = j.D2u(c, i, k);
      }
    }
  }
  return j;
}

/// One-dimensional jets written as planar jets: u(x) = f(x1) with the given slope.
Jet2 modica_jet(double u, double slope, double angle) {
  Jet2 j(2, 1);
  j.u[0] = u;
  j.Du(0, 0) = slope * std::cos(angle);
  j.Du(0, 1) = slope * std::sin(angle);
  return j;
}

ClosedFormField squared_radius() {
  return {"r2", json::object(), 2, 1, [](std::span<const double> x, Jet2& j) {
            j.u[0] = x[0] * x[0] + x[1] * x[1];
            j.Du(0, 0) = 2 * x[0];
            j.Du(0, 1) = 2 * x[1];
            j.D2u(0, 0, 0) = 2;
            j.D2u(0, 1, 1) = 2;
          }};
}

}  // namespace

TEST_CASE("stress tensor examples") {
  const auto dw = make_potential("double_well");
  const auto f = catalog_make("tanh_planar");
  for (double x = -3; x <= 3; x += 0.5) {
    const Jet2 j = f.jet(std::vector<double>{x, 0.2});
    const auto T = stress_tensor(j, dw);
    const double W = dw.value(j.u);
    CHECK(std::abs(T.T(0, 0)) <= 1e-15);
    CHECK(std::abs(T.T(1, 1) + 2 * W) <= 1e-15);
    CHECK(std::abs(T.T(0, 1)) <= 1e-15);
  }
  const auto zero = catalog_make("constant", {{"value", {0.0}}, {"n", 2}});
  const auto T0 = stress_tensor(zero.jet(std::vector<double>{0.4, 0.1}), dw);
  CHECK((T0.T + 0.25 * Eigen::MatrixXd::Identity(2, 2)).norm() == 0.0);

  std::mt19937_64 rng(21);
  const auto p = gl2();
  for (int k = 0; k < 100; ++k) {
    const Jet2 j = random_jet(rng, 2);
    const auto T = stress_tensor(j, p);
    CHECK(std::abs(T.trace() + 2 * p.value(j.u)) <= 1e-12 * std::max(1.0, j.grad_sq()));
    CHECK((T.T - T.T.transpose()).norm() == 0.0);
    CHECK((T.T - T.isotropic - T.gram).norm() <= 1e-14 * std::max(1.0, j.grad_sq()));
  }
}

TEST_CASE("divergence of the stress tensor on solution grids") {
  // the grid jets of the circular solution keep its rotational symmetry, so
  // the discrete divergence vanishes up to roundoff at every spacing
  const auto p = gl2();
  const auto pair = divergence_residual(gl_grid(0.02), gl_grid(0.01), p);
  CHECK(pair.coarse <= 1e-10);
  CHECK(pair.fine <= 1e-10);

  const auto dw = make_potential("double_well");
  const auto fronts = divergence_residual(suite::relaxed_front(0.05), suite::relaxed_front(0.025),
                                          dw);
  CHECK(fronts.coarse <= 1e-3);
  CHECK(fronts.ratio() > 3.5);
  CHECK(fronts.ratio() < 4.5);
}

TEST_CASE("a perturbed field is rejected and its divergence does not converge") {
  const auto p = gl2();
  auto perturbed = [](double h) {
    GridField g = gl_grid(h);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> noise(-1e-3, 1e-3);
    for (double& v : g.values()) v += noise(rng);
    return g;
  };
  CHECK_THROWS_AS(divergence_sup(perturbed(0.02), p), PlanarError);
  const auto pair = divergence_residual(perturbed(0.02), perturbed(0.01), p, 0.0);
  CHECK(pair.fine > 0.5 * pair.coarse);
  CHECK(pair.fine > 1e-2);
}

TEST_CASE("Hessian of U examples") {
  std::mt19937_64 rng(4);
  const auto p = gl2();
  for (int k = 0; k < 100; ++k) {
    const Jet2 j = random_jet(rng, 2);
    CHECK(std::abs(hessian_U(j, p).trace() - 4 * p.value(j.u)) <=
          1e-12 * std::max(1.0, j.grad_sq()));
  }

  const auto zero = make_potential("zero", {{"m", 2}});
  const auto conformal = catalog_make("harmonic_linear_map", {{"scale", 1.7}, {"angle", 0.3}});
  const Jet2 jc = conformal.jet(std::vector<double>{0.2, -0.4});
  const auto Hc = hessian_U(jc, zero);
  CHECK(std::abs(Hc.u11) <= 1e-14);
  CHECK(std::abs(Hc.u12) <= 1e-14);
  CHECK(std::abs(Hc.u22) <= 1e-14);
  CHECK(is_conformal(jc, zero));
  const auto sheared = catalog_make("linear", {{"A", {{1.0, 0.5}, {0.0, 1.0}}}});
  CHECK_FALSE(is_conformal(sheared.jet(std::vector<double>{0.0, 0.0}), zero));

  for (double R : {0.3, 0.5, 0.8}) {
    const Jet2 j = catalog_make("gl_circle_planar", {{"R", R}}).jet(std::vector<double>{0.3, 0.0});
    const double s = R * R;
    CHECK(hessian_U(j, p).u22 == doctest::Approx((1 - s) * (1 - 3 * s) / 2).epsilon(1e-12));
  }
  const Jet2 line = catalog_make("gl_circle", {{"R", 0.5}}).jet(std::vector<double>{0.0});
  CHECK_THROWS_AS(hessian_U(line, p), PlanarError);
}

TEST_CASE("compatibility relations converge on solutions") {
  const auto dw = make_potential("double_well");
  const double coarse = compatibility_residual(suite::relaxed_front(0.05), dw);
  const double fine = compatibility_residual(suite::relaxed_front(0.025), dw);
  CHECK(coarse <= 1e-3);
  CHECK(coarse / fine > 3.5);
  CHECK(coarse / fine < 4.5);
  CHECK(compatibility_residual(gl_grid(0.02, 0.6), gl2()) <= 1e-10);
}

TEST_CASE("U from its Hessian on the circular solution") {
  const auto p = gl2();
  auto check_quadratic = [&](double h) {
    const auto g = gl_grid(h);
    const std::vector<double> x0{0.0, 0.2};
    const auto uf = reconstruct_U(g, p, x0);
    const Jet2 j = catalog_make("gl_circle_planar", {{"R", 0.5}}).jet(x0);
    const auto H = hessian_U(j, p);
    double worst = 0.0;
    for (std::size_t k = 0; k < uf.U.node_count(); ++k) {
      const auto idx = uf.U.multi(k);
      const auto x = uf.U.node_position(idx);
      const double d0 = x[0] - x0[0];
      const double d1 = x[1] - x0[1];
      const double exact = 0.5 * (H.u11 * d0 * d0 + 2 * H.u12 * d0 * d1 + H.u22 * d1 * d1);
      worst = std::max(worst, std::abs(uf.U.at(idx, 0) - exact));
    }
    return worst;
  };
  const double coarse = check_quadratic(0.02);
  const double fine = check_quadratic(0.01);
  CHECK(coarse <= 1e-3);
  CHECK(coarse / fine > 3.5);
  CHECK(coarse / fine < 4.5);
}

TEST_CASE("FD Hessian of the reconstructed U converges to the formula") {
  const auto p = gl2();
  auto error_at = [&](double h) {
    const auto g = gl_grid(h, 0.7);
    const auto uf = reconstruct_U(g, p, std::vector<double>{0.0, 0.2});
    const Jet2 j = catalog_make("gl_circle_planar", {{"R", 0.7}}).jet(std::vector<double>{0.0, 0.2});
    const auto H = hessian_U(j, p);
    const int r = uf.U.extents()[0] / 2;
    const int c = uf.U.extents()[1] / 2;
    auto at = [&](int a, int b) { return uf.U.at(std::vector<int>{a, b}, 0); };
    const double u11 = (at(r + 1, c) - 2 * at(r, c) + at(r - 1, c)) / (h * h);
    const double u22 = (at(r, c + 1) - 2 * at(r, c) + at(r, c - 1)) / (h * h);
    const double u12 =
        (at(r + 1, c + 1) - at(r + 1, c - 1) - at(r - 1, c + 1) + at(r - 1, c - 1)) / (4 * h * h);
    return std::max({std::abs(u11 - H.u11), std::abs(u22 - H.u22), std::abs(u12 - H.u12)});
  };
  const double coarse = error_at(0.02);
  const double fine = error_at(0.01);
  CHECK(coarse <= 1e-3);
  CHECK(coarse / fine > 3.5);
  CHECK(coarse / fine < 4.5);
}

TEST_CASE("U on the relaxed front") {
  const auto dw = make_potential("double_well");
  const auto coarse = suite::relaxed_front(0.05);
  const auto fine = suite::relaxed_front(0.025);
  const std::vector<double> x0{0.0, 0.5};
  const auto uc = reconstruct_U(coarse, dw, x0);
  const auto uf = reconstruct_U(fine, dw, x0);
  CHECK(uc.path_defect / uf.path_defect > 3.0);
  CHECK(uc.laplacian_defect(coarse, dw) <= 5e-3);
  CHECK(uc.laplacian_defect(coarse, dw) / uf.laplacian_defect(fine, dw) > 3.0);

  // a second gauge differs by an affine function
  const auto other = reconstruct_U(coarse, dw, std::vector<double>{1.0, 0.25});
  Eigen::MatrixXd A(static_cast<Eigen::Index>(uc.U.node_count()), 3);
  Eigen::VectorXd d(A.rows());
  for (std::size_t k = 0; k < uc.U.node_count(); ++k) {
    const auto idx = uc.U.multi(k);
    const auto x = uc.U.node_position(idx);
    A.row(static_cast<Eigen::Index>(k)) << 1.0, x[0], x[1];
    d(static_cast<Eigen::Index>(k)) = uc.U.at(idx, 0) - other.U.at(idx, 0);
  }
  const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(d);
  const double fit = (A * coef - d).cwiseAbs().maxCoeff();
  CHECK(fit <= std::max(1e-8, 4 * (uc.path_defect + other.path_defect)));
}

TEST_CASE("convexity classification") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> uni(-1.2, 1.2);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  const auto dw = make_potential("double_well");
  for (int k = 0; k < 1000; ++k) {
    const double u = uni(rng);
    const double slope = std::sqrt(2 * dw.value(std::span(&u, 1))) * frac(rng);
    const Jet2 j = modica_jet(u, slope, 2 * kPi * frac(rng));
    const auto st = convexity_status(j, dw);
    CHECK(st.convex());
    CHECK(st.consistent());
    const double lhs = std::pow(j.col_dot(0, 0) - j.col_dot(1, 1), 2) + 4 * std::pow(j.col_dot(0, 1), 2);
    CHECK(std::abs(lhs - j.grad_sq() * j.grad_sq()) <= 1e-12 * std::max(1.0, std::pow(j.grad_sq(), 2)));
  }
  for (int k = 0; k < 1000; ++k) {
    const Jet2 j = random_jet(rng, 3);
    const auto p = make_potential("ginzburg_landau", {{"m", 3}});
    const auto st = convexity_status(j, p);
    CHECK(st.consistent());
    CHECK((st.det >= 0) == (st.margin >= 0));
    const double lhs = std::pow(j.col_dot(0, 0) - j.col_dot(1, 1), 2) + 4 * std::pow(j.col_dot(0, 1), 2);
    CHECK(lhs <= j.grad_sq() * j.grad_sq() * (1 + 1e-12));
  }
  const auto p = gl2();
  const auto at = std::vector<double>{0.3, 0.0};
  const auto below = catalog_make("gl_circle_planar", {{"R", std::sqrt(0.3)}}).jet(at);
  const auto above = catalog_make("gl_circle_planar", {{"R", std::sqrt(0.5)}}).jet(at);
  CHECK(convexity_status(below, p).convex());
  CHECK_FALSE(convexity_status(above, p).convex());

  const auto zero = make_potential("zero", {{"m", 2}});
  const auto jc = catalog_make("harmonic_linear_map", {{"scale", 2.0}, {"angle", 1.0}})
                      .jet(std::vector<double>{0.5, 0.5});
  const auto st = convexity_status(jc, zero);
  CHECK(std::abs(st.det) <= 1e-13);
  CHECK(std::abs(st.margin) <= 1e-13);
}

TEST_CASE("disk quadrature") {
  const Density one = [](std::span<const double>) { return 1.0; };
  const Density x1sq = [](std::span<const double> x) { return x[0] * x[0]; };
  CHECK(std::abs(disk_integral(one, {0, 0}, 1.0) - kPi) <= 1e-12);
  CHECK(std::abs(disk_integral(x1sq, {0, 0}, 1.0) - kPi / 4) <= 1e-12);

  const double r0 = 0.8;
  auto bump = [r0](double r) {
    const double q = r / r0;
    return q < 1.0 ? std::exp(-1.0 / (1.0 - q * q)) : 0.0;
  };
  const Density f = [&](std::span<const double> x) {
    return bump(std::hypot(x[0] - 0.3, x[1] + 0.1));
  };
  const double oracle =
      2 * kPi * quad::composite([&](double r) { return bump(r) * r; }, 0.0, r0, 64, 20);
  CHECK(std::abs(disk_integral(f, {0.3, -0.1}, r0) - oracle) <= 1e-8);
  const auto est = disk_integral_estimate(f, {0.3, -0.1}, r0);
  CHECK(est.error < 1e-8);
}

TEST_CASE("Green identity") {
  const auto zero = make_potential("zero", {{"m", 1}});
  const auto affine = catalog_make("linear", {{"A", {{0.7, -1.1}}}});
  const auto flat = green_boundary_identity(affine.source(), zero, {0.2, 0.1}, 1.5);
  CHECK(std::abs(flat.lhs) <= 1e-14);
  CHECK(std::abs(flat.rhs) <= 1e-12);

  const auto circle = green_boundary_identity(
      catalog_make("gl_circle_planar", {{"R", 0.5}}).source(), gl2(), {0.0, 0.0}, 1.0);
  CHECK(circle.defect <= 1e-6);
  CHECK(circle.lhs > 0.0);

  const auto dw = make_potential("double_well");
  const auto front = green_boundary_identity(catalog_make("tanh_planar").source(), dw,
                                             {0.0, 0.0}, 2.0);
  CHECK(front.defect <= 1e-6);
  const json j = front.to_json();
  CHECK(j.at("rule_order").at("radial") == 64);
  CHECK(j.at("rule_order").at("boundary") == 256);
  CHECK(j.contains("lhs"));

  Box tiny{{-1.0, -1.0}, {1.0, 1.0}};
  CHECK_THROWS_AS(green_boundary_identity(catalog_make("tanh_planar").source(), dw, {0.0, 0.0},
                                          2.0, {}, tiny),
                  PlanarError);
  const auto not_solution = catalog_make("product_saddle");
  CHECK_THROWS_AS(green_boundary_identity(not_solution.source(), dw, {0.0, 0.0}, 1.0),
                  PlanarError);
}

TEST_CASE("monotonicity profiles") {
  std::vector<double> radii;
  for (int k = 1; k <= 8; ++k) radii.push_back(0.5 * k);

  const auto lap = monotonicity_profile(laplacian_density(squared_radius().source()), {0, 0}, radii);
  CHECK(lap.monotone);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    CHECK(std::abs(lap.values[k] - 4 * kPi * radii[k]) <= 1e-12 * 4 * kPi * radii[k]);
  }

  const auto dw = make_potential("double_well");
  const auto W = monotonicity_profile(potential_density(catalog_make("tanh_planar").source(), dw),
                                      {0, 0}, radii);
  CHECK(W.monotone);
  CHECK(to_string(W.density) == "potential_W");

  const auto harm = monotonicity_profile(
      harmonic_density(catalog_make("harmonic_linear_map").source()), {0.5, 0.5}, radii);
  CHECK(harm.monotone);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    CHECK(harm.values[k] == doctest::Approx(2 * kPi * radii[k]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(harmonic_density(catalog_make("gl_circle_planar", {{"R", 0.5}}).source())
                      .f(std::vector<double>{0.0, 0.0}),
                  PlanarError);

  const auto path = std::filesystem::temp_directory_path() / "gradlab_profile.csv";
  W.write_csv(path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "r,M(r),quad_error_estimate");
  std::filesystem::remove(path);

  CHECK_THROWS(monotonicity_profile(laplacian_density(squared_radius().source()), {0, 0},
                                    {1.0, 0.5}));
}
