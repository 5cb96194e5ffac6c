#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "gradlab/dynamics.hpp"

using namespace gradlab;
using nlohmann::json;

namespace {

const double kSqrt2 = std::numbers::sqrt2;

double max_drift_over(const Potential& p, const PhasePoint& start, double dt, double span) {
  const auto steps = static_cast<std::size_t>(std::lround(span / dt));
  return integrate(p, start, dt, steps).max_drift();
}

}  // namespace

TEST_CASE("one period of a circular orbit returns to the start") {
  const auto p = make_potential("ginzburg_landau", {{"m", 2}});
  const auto fam = orbit_family(0.5);
  const auto steps = static_cast<std::size_t>(std::lround(fam.period / 1e-3));
  const auto tr = integrate(p, fam.start(), fam.period / steps, steps);
  const auto& end = tr.states.back();
  const auto& s0 = tr.states.front();
  CHECK(std::hypot(end.u[0] - s0.u[0], end.u[1] - s0.u[1]) <= 1e-6);
  CHECK(std::hypot(end.v[0] - s0.v[0], end.v[1] - s0.v[1]) <= 1e-6);
  CHECK(tr.max_drift() <= 1e-8);
  CHECK(tr.H.front() == doctest::Approx(fam.H).epsilon(1e-12));
}

TEST_CASE("an equilibrium stays put") {
  const auto p = make_potential("ginzburg_landau", {{"m", 2}});
  const auto tr = integrate(p, {{1.0, 0.0}, {0.0, 0.0}}, 1e-2, 500);
  for (const auto& s : tr.states) {
    CHECK(s.u == std::vector<double>{1.0, 0.0});
    CHECK(s.v == std::vector<double>{0.0, 0.0});
  }
  CHECK(tr.H.back() == 0.0);
}

TEST_CASE("the double-well orbit through the origin with H = 0 follows tanh") {
  const auto p = make_potential("double_well");
  auto worst_at = [&](double dt) {
    const auto tr = integrate(p, {{0.0}, {1.0 / kSqrt2}}, dt, std::lround(5.0 / dt));
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
      worst = std::max(worst, std::abs(tr.states[k].u[0] - std::tanh(tr.t[k] / kSqrt2)));
    }
    return worst;
  };
  const double coarse = worst_at(1e-3);
  const double fine = worst_at(5e-4);
  CHECK(fine <= 1e-6);
  CHECK(coarse / fine > 3.5);
  CHECK(coarse / fine < 4.5);
}

TEST_CASE("Hamiltonian values") {
  const auto gl = make_potential("ginzburg_landau", {{"m", 2}});
  const auto fam = orbit_family(0.5);
  CHECK(hamiltonian(gl, fam.start()) == doctest::Approx(-3.0 / 64.0).epsilon(1e-14));
  CHECK(fam.H == doctest::Approx(-0.046875).epsilon(1e-14));
  const auto dw = make_potential("double_well");
  CHECK(std::abs(hamiltonian(dw, {{0.0}, {1.0 / kSqrt2}})) < 1e-16);
  CHECK(hamiltonian(gl, {{0.0, 1.0}, {0.0, 0.0}}) == 0.0);
}

TEST_CASE("orbit family formulas") {
  const auto top = orbit_family(std::sqrt(2.0 / 3.0));
  CHECK(top.H == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
  CHECK(std::abs(orbit_family(std::sqrt(1.0 / 3.0)).H) < 1e-15);
  for (double R = 0.1; R < 0.95; R += 0.1) {
    const auto f = orbit_family(R);
    const double s = R * R;
    CHECK(std::abs(f.H - (-3.0 * s * s + 4.0 * s - 1.0) / 4.0) <= 1e-14);
    CHECK(f.lambda == doctest::Approx(0.25 * (s - 1.0) * (s - 1.0)));
    CHECK(f.mu == doctest::Approx(1.0 - s));
    CHECK((f.H > 0.0) == (s > 1.0 / 3.0));
  }
  CHECK_THROWS(orbit_family(1.0));
  CHECK_THROWS(orbit_family(0.0));
}

TEST_CASE("leapfrog drift is second order on a non-circular orbit") {
  const auto p = make_potential("double_well");
  const PhasePoint start{{0.6}, {0.0}};
  const double coarse = max_drift_over(p, start, 0.02, 20.0);
  const double fine = max_drift_over(p, start, 0.01, 20.0);
  CHECK(coarse / fine > 3.5);
  CHECK(coarse / fine < 4.5);
}

TEST_CASE("heteroclinic of the double well") {
  const auto p = make_potential("double_well");
  const auto tr = shoot_heteroclinic(p, -1.0, 1.0, 1e-8);
  double profile = 0.0;
  double equipartition = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const double u = tr.states[k].u[0];
    const double v = tr.states[k].v[0];
    profile = std::max(profile, std::abs(u - std::tanh(tr.t[k] / kSqrt2)));
    equipartition = std::max(equipartition, std::abs(0.5 * v * v - p.value(std::span(&u, 1))));
  }
  CHECK(profile <= 1e-8);
  CHECK(equipartition <= 1e-10);
  CHECK(std::abs(tr.states.front().u[0] + 1.0) <= 1e-8);
  CHECK(std::abs(tr.states.back().u[0] - 1.0) <= 1e-8);

  // odd about the midpoint: the sample at t and the one at -t
  std::size_t mid = 0;
  while (tr.t[mid] < 0.0) ++mid;
  for (std::size_t k = 1; k <= mid && mid + k < tr.size(); ++k) {
    CHECK(std::abs(tr.states[mid + k].u[0] + tr.states[mid - k].u[0]) <= 1e-10);
  }
}

TEST_CASE("heteroclinic input validation") {
  CHECK_THROWS_AS(shoot_heteroclinic(make_potential("ginzburg_landau", {{"m", 2}}), -1, 1, 1e-6),
                  DynamicsError);
  CHECK_THROWS_AS(shoot_heteroclinic(make_potential("double_well"), -0.5, 1, 1e-6), DynamicsError);
  CHECK_THROWS_AS(shoot_heteroclinic(make_potential("double_well"), -1, 1, 1e-6, 0.0),
                  DynamicsError);
}

TEST_CASE("blow-up is reported with the last valid state") {
  const auto p = make_potential("quadratic", {{"m", 1}});
  try {
    integrate(p, {{1.0}, {1.0}}, 1e-2, 100000);
    FAIL("expected blow-up");
  } catch (const BlowUpError& e) {
    REQUIRE(e.partial().size() == e.last_valid() + 1);
    CHECK(std::abs(e.partial().states.back().u[0]) <= 1e6);
    CHECK(e.last_valid() > 1000);
  }
}

TEST_CASE("trajectory csv header") {
  const auto p = make_potential("ginzburg_landau", {{"m", 2}});
  const auto tr = integrate(p, orbit_family(0.5).start(), 1e-2, 10);
  const auto path = std::filesystem::temp_directory_path() / "gradlab_traj.csv";
  tr.write_csv(path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,u_1,u_2,v_1,v_2,H");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 11);
  std::filesystem::remove(path);
}
