#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "gradlab/fields.hpp"

using namespace gradlab;
using nlohmann::json;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

ClosedFormField sine_x1() {
  return {"sine", json::object(), 2, 1, [](std::span<const double> x, Jet2& j) {
            j.u[0] = std::sin(x[0]);
            j.Du(0, 0) = std::cos(x[0]);
            j.D2u(0, 0, 0) = -std::sin(x[0]);
          }};
}

}  // namespace

TEST_CASE("constant field has vanishing derivatives") {
  const auto f = catalog_make("constant", {{"value", {0.3, -0.7}}, {"n", 2}});
  const std::vector<double> x{1.5, -2.0};
  const Jet2 j = f.jet(x);
  CHECK(j.u == std::vector<double>{0.3, -0.7});
  for (double v : j.du) CHECK(v == 0.0);
  for (double v : j.d2u) CHECK(v == 0.0);
}

TEST_CASE("gl_circle jet at the origin") {
  const auto f = catalog_make("gl_circle", {{"R", 0.5}});
  const std::vector<double> x{0.0};
  const Jet2 j = f.jet(x);
  CHECK(j.u[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(j.u[1]) < 1e-15);
  CHECK(std::abs(j.Du(0, 0)) < 1e-15);
  CHECK(j.Du(1, 0) == doctest::Approx(0.5 * std::sqrt(0.75)).epsilon(1e-14));
}

TEST_CASE("gl_circle stays on its circle and rejects R outside (0,1)") {
  const auto f = catalog_make("gl_circle", {{"R", 0.9}});
  for (double x = -10.0; x <= 10.0; x += 0.37) {
    const std::vector<double> p{x};
    const auto u = f.value(p);
    CHECK(std::hypot(u[0], u[1]) == doctest::Approx(0.9).epsilon(1e-14));
  }
  CHECK_THROWS_AS(catalog_make("gl_circle", {{"R", 1.0}}), FieldError);
  CHECK_THROWS_AS(catalog_make("gl_circle", {{"R", 0.0}}), FieldError);
  CHECK_THROWS_AS(catalog_make("no_such_field"), FieldError);
}

TEST_CASE("tanh_profile at the origin") {
  const auto f = catalog_make("tanh_profile");
  const std::vector<double> x{0.0};
  const Jet2 j = f.jet(x);
  CHECK(j.u[0] == 0.0);
  CHECK(j.Du(0, 0) == doctest::Approx(1.0 / std::numbers::sqrt2).epsilon(1e-15));
}

TEST_CASE("analytic jets agree with point-evaluation differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coord(-1.5, 1.5);
  const std::vector<std::pair<std::string, json>> entries{
      {"constant", {{"value", {0.2}}, {"n", 2}}},
      {"linear", {{"A", {{1.0, 2.0}, {-0.5, 0.25}}}, {"b", {0.1, 0.2}}}},
      {"gl_circle", {{"R", 0.6}}},
      {"gl_circle_planar", {{"R", 0.4}}},
      {"tanh_profile", json::object()},
      {"tanh_planar", {{"angle", 0.7}}},
      {"harmonic_linear_map", {{"scale", 1.3}, {"angle", 0.4}}},
      {"product_saddle", json::object()},
  };
  for (const auto& [name, params] : entries) {
    CAPTURE(name);
    const auto f = catalog_make(name, params);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> x(f.n());
      for (double& c : x) c = coord(rng);
      const Jet2 exact = f.jet(x);
      const Jet2 fd = pointwise_fd_jet(f, x, 1e-4);
      double scale = 1.0;
      for (double v : exact.du) scale = std::max(scale, std::abs(v));
      for (double v : exact.d2u) scale = std::max(scale, std::abs(v));
      CHECK(max_abs_diff(exact.du, fd.du) / scale < 1e-6);
      CHECK(max_abs_diff(exact.d2u, fd.d2u) / scale < 1e-6);
      // symmetric in the trailing index pair
      for (int c = 0; c < f.m(); ++c)
        for (int i = 0; i < f.n(); ++i)
          for (int k = 0; k < f.n(); ++k)
            CHECK(std::abs(exact.D2u(c, i, k) - exact.D2u(c, k, i)) <= 1e-12);
    }
  }
}

TEST_CASE("grid stencils are exact on affine and quadratic data") {
  const auto lin = catalog_make("linear", {{"A", {{0.5, -1.25}}}, {"b", {2.0}}});
  const auto g = sample_grid(lin, {-1.0, -1.0}, {0.125, 0.25}, {17, 9});
  const std::vector<int> node{5, 4};
  const Jet2 j = g.fd_jet(node);
  CHECK(j.Du(0, 0) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(j.Du(0, 1) == doctest::Approx(-1.25).epsilon(1e-13));
  for (double v : j.d2u) CHECK(std::abs(v) < 1e-12);

  const auto sq = sample_grid(catalog_make("product_saddle"), {-1.0, -1.0}, {0.125, 0.125},
                              {17, 17});
  for (auto order : {StencilOrder::second, StencilOrder::fourth}) {
    const Jet2 q = sq.fd_jet(std::vector<int>{7, 10}, order);
    CHECK(q.D2u(0, 0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(q.D2u(0, 0, 1) == q.D2u(0, 1, 0));
    CHECK(std::abs(q.D2u(0, 0, 0)) < 1e-12);
  }
}

TEST_CASE("second derivative of sin at h = 0.01") {
  const auto g = sample_grid(sine_x1(), {0.0, 0.0}, {0.01, 0.01}, {301, 5});
  double worst = 0.0;
  for (int i = 1; i < 300; ++i) {
    const std::vector<int> node{i, 2};
    const Jet2 j = g.fd_jet(node);
    worst = std::max(worst, std::abs(j.D2u(0, 0, 0) + std::sin(j.x[0])));
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("grid jets of tanh converge at second order") {
  const auto f = catalog_make("tanh_profile");
  auto error_at = [&](double h) {
    const int count = static_cast<int>(std::lround(4.0 / h)) + 1;
    const auto g = sample_grid(f, {-2.0}, {h}, {count});
    const std::vector<double> x{0.5};
    const Jet2 fd = g.jet(x);
    const Jet2 exact = f.jet(x);
    return std::max(std::abs(fd.Du(0, 0) - exact.Du(0, 0)),
                    std::abs(fd.D2u(0, 0, 0) - exact.D2u(0, 0, 0)));
  };
  const double ratio = error_at(0.1) / error_at(0.05);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("grid jets refuse boundary nodes and off-grid points") {
  const auto g = sample_grid(catalog_make("tanh_planar"), {0.0, 0.0}, {0.1, 0.1}, {6, 6});
  CHECK_THROWS_AS(g.fd_jet(std::vector<int>{0, 3}), FieldError);
  CHECK_THROWS_AS(g.fd_jet(std::vector<int>{1, 3}, StencilOrder::fourth), FieldError);
  CHECK_THROWS_AS(g.jet(std::vector<double>{0.05, 0.2}), FieldError);
  CHECK_THROWS_AS(GridField(2, 1, {0.0, 0.0}, {0.1, 0.1}, {4, 6}), FieldError);
  CHECK_THROWS_AS(GridField(2, 1, {0.0, 0.0}, {0.0, 0.1}, {6, 6}), FieldError);
}

TEST_CASE("gridfield text format round trip") {
  const auto f = catalog_make("gl_circle_planar", {{"R", 0.5}});
  const auto g = sample_grid(f, {-1.0, 0.0}, {0.1, 0.2}, {21, 6});
  const auto path = std::filesystem::temp_directory_path() / "gradlab_roundtrip.txt";
  write_gridfield(g, path, {{"source", "test"}});
  const GridField back = read_gridfield(path);
  CHECK(back.n() == 2);
  CHECK(back.m() == 2);
  CHECK(back.extents() == g.extents());
  CHECK(back.h() == g.h());
  CHECK(back.origin() == g.origin());
  CHECK(back.values() == g.values());
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".json");
}

TEST_CASE("tilted tanh front solves the scalar equation") {
  const auto f = catalog_make("tanh_planar", {{"angle", 0.4}});
  for (double a = -2.0; a <= 2.0; a += 0.25) {
    const std::vector<double> x{a, 0.3 * a + 0.1};
    const Jet2 j = f.jet(x);
    const double u = j.u[0];
    CHECK(std::abs(j.laplacian(0) - (u * u * u - u)) < 1e-14);
  }
}
