#include <benchmark/benchmark.h>

#include "extheat/complexity.hpp"
#include "extheat/freespace.hpp"
#include "extheat/theta_heat.hpp"

using namespace extheat;

static void BM_RingKernel(benchmark::State& state) {
  const RingKernelTable k(static_cast<int>(state.range(0)), 0.7);
  double r = 1.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(k(r, 2.1));
    r += 1e-9;
  }
}
BENCHMARK(BM_RingKernel)->Arg(3)->Arg(4)->Arg(5);

static void BM_BallMass(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_ball_mass(2.0, 5.0, 3.0, dim));
}
BENCHMARK(BM_BallMass)->Arg(3)->Arg(4);

static void BM_WindowSearch(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(window_search(0.2, 2.0, 1.0, 10.0, 3).time);
}
BENCHMARK(BM_WindowSearch);

// Fixed step count: dt = 1e-3 uniform over a 0.1 window is 100 steps.
static void BM_SolverSteps(benchmark::State& state) {
  const auto grid = make_radial_grid({3, 1.0, 100.0, static_cast<int>(state.range(0)), 1.0});
  SolverParams p;
  p.outer_bc = OuterBC::homogeneous_neumann;
  const ThetaHeatSolver solver(grid, ThetaBC(0.5), p);
  // Data filling the domain; a sharp shell leaves subnormal tails whose
  // arithmetic dominates the timing on fine grids.
  const auto u0 = RadialField::constant(grid, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solver.evolve(u0, 0.1).field.values.data());
  state.SetItemsProcessed(state.iterations() * 100 * state.range(0));
}
BENCHMARK(BM_SolverSteps)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_FreeEvolution(benchmark::State& state) {
  const auto grid = make_radial_grid(stretched_domain(3, 1.0, 200.0, 0.01, 1.01));
  const auto u0 = RadialField::shell_indicator(grid, 2.0, 3.0);
  for (auto _ : state) benchmark::DoNotOptimize(freespace_evolve_radial(u0, 10.0).values.data());
}
BENCHMARK(BM_FreeEvolution)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
