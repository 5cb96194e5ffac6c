#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "gradlab/kernels.hpp"

using namespace gradlab;
using namespace gradlab::kernels;

namespace {

GridShape square(int side, int m) { return {2, m, side, side, 1.0 / side, 1.0 / side}; }

std::vector<double> noise(const GridShape& g) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(g.nodes() * g.m);
  for (double& x : v) x = u(rng);
  return v;
}

const Potential& potential(int m) {
  static const Potential dw = make_potential("double_well");
  static const Potential gl = make_potential("ginzburg_landau", {{"m", 2}});
  return m == 1 ? dw : gl;
}

template <auto Sweep>
void sweep(benchmark::State& state) {
  const auto g = square(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  auto u = noise(g);
  const double tau = 0.2 * g.h0 * g.h0;
  int color = 0;
  for (auto _ : state) {
    Sweep(g, u, potential(g.m), tau, color);
    color ^= 1;
    benchmark::DoNotOptimize(u.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.nodes()) / 2);
}

template <auto Reduce>
void reduce(benchmark::State& state) {
  const auto g = square(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  const auto u = noise(g);
  for (auto _ : state) benchmark::DoNotOptimize(Reduce(g, u, potential(g.m)));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.nodes()));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int side : {64, 256, 1024}) {
    for (int m : {1, 2}) b->Args({side, m});
  }
}

}  // namespace

BENCHMARK(sweep<serial::sweep>)->Name("sweep/serial")->Apply(sizes);
BENCHMARK(sweep<omp::sweep>)->Name("sweep/omp")->Apply(sizes)->UseRealTime();
BENCHMARK(reduce<serial::residual>)->Name("residual/serial")->Apply(sizes);
BENCHMARK(reduce<omp::residual>)->Name("residual/omp")->Apply(sizes)->UseRealTime();
BENCHMARK(reduce<serial::energy>)->Name("energy/serial")->Apply(sizes);
BENCHMARK(reduce<omp::energy>)->Name("energy/omp")->Apply(sizes)->UseRealTime();

BENCHMARK_MAIN();
