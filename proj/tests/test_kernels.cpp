#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <random>

#include "gradlab/kernels.hpp"
#include "gradlab/solver.hpp"

using namespace gradlab;
using namespace gradlab::kernels;

namespace {

struct Threads {
  int saved = omp_get_max_threads();
  explicit Threads(int n) { omp_set_num_threads(n); }
  ~Threads() { omp_set_num_threads(saved); }
};

std::vector<double> random_values(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  std::vector<double> v(count);
  for (double& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("serial and parallel kernels agree bitwise") {
  const Threads threads(4);
  for (int m : {1, 2}) {
    CAPTURE(m);
    const auto p = m == 1 ? make_potential("double_well")
                          : make_potential("ginzburg_landau", {{"m", 2}});
    for (const GridShape g : {GridShape{2, m, 37, 23, 0.05, 0.04}, GridShape{1, m, 101, 1, 0.02, 1.0}}) {
      auto a = random_values(g.nodes() * m, 17);
      auto b = a;
      CHECK(serial::residual(g, a, p) == omp::residual(g, b, p));
      CHECK(serial::energy(g, a, p) == omp::energy(g, b, p));
      for (int it = 0; it < 20; ++it) {
        serial::sweep(g, a, p, 1e-4, it % 2);
        omp::sweep(g, b, p, 1e-4, it % 2);
      }
      CHECK(a == b);
      CHECK(serial::energy(g, a, p) == omp::energy(g, b, p));
    }
  }
}

TEST_CASE("minimum search picks the first minimiser") {
  const Threads threads(3);
  const std::vector<double> v{3.0, 1.0, 2.0, 1.0, 5.0, NAN, 7.0};
  auto margin = [&](std::size_t k) { return v[k]; };
  const auto s = serial::min_margin(v.size(), margin);
  const auto o = omp::min_margin(v.size(), margin);
  CHECK(s.index == o.index);
  CHECK(s.value == o.value);
  CHECK(std::isinf(s.value));
  CHECK(s.index == 5);

  const std::vector<double> w{3.0, 1.0, 2.0, 1.0, 5.0};
  auto m2 = [&](std::size_t k) { return w[k]; };
  CHECK(omp::min_margin(w.size(), m2).index == 1);
  CHECK(serial::min_margin(w.size(), m2).value == 1.0);
}

TEST_CASE("relaxation does not depend on the thread count") {
  const auto p = make_potential("double_well");
  solver::RelaxConfig cfg;
  cfg.origin = {-2.0, 0.0};
  cfg.h = {0.1, 0.1};
  cfg.extents = {41, 11};
  cfg.boundary = catalog_make("tanh_planar", {{"angle", 0.3}});
  cfg.tol = 1e-8;
  const auto init = solver::boundary_start(cfg, 1);

  cfg.parallel = false;
  const auto ref = solver::relax(p, cfg, init);
  cfg.parallel = true;
  for (int n : {1, 2, 4}) {
    const Threads threads(n);
    const auto run = solver::relax(p, cfg, init);
    CHECK(run.iterations == ref.iterations);
    CHECK(run.field.values() == ref.field.values());
    CHECK(run.energy == ref.energy);
  }
}
