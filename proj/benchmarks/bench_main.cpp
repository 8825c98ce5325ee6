#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mcflab/convex_flow.hpp"
#include "mcflab/estimates_lab.hpp"
#include "mcflab/levelset_arrival.hpp"
#include "mcflab/rescale_graph.hpp"
#include "mcflab/sphere_spectral.hpp"

namespace {

using namespace mcflab;

void BM_Analyze(benchmark::State& state) {
  const auto grid = SphereGrid::circle(static_cast<int>(state.range(0)));
  std::vector<double> u(static_cast<std::size_t>(grid.nodes()));
  for (int j = 0; j < grid.nodes(); ++j) u[j] = std::cos(3.0 * grid.angle(j)) + 0.1 * std::sin(7.0 * grid.angle(j));
  for (auto _ : state) benchmark::DoNotOptimize(analyze(u, grid));
}
BENCHMARK(BM_Analyze)->Arg(64)->Arg(256)->Arg(1024);

void BM_StepFlow(benchmark::State& state) {
  const auto sf = ellipse_support(static_cast<int>(state.range(0)), 1.2, 1.0 / 1.2);
  const double dt = 0.5 * stable_time_step(sf);
  for (auto _ : state) benchmark::DoNotOptimize(step_flow(sf, dt));
}
BENCHMARK(BM_StepFlow)->Arg(128)->Arg(256)->Arg(512);

void BM_ExtractGraph(benchmark::State& state) {
  const auto sf = ellipse_support(256, 1.2, 1.0 / 1.2);
  const auto boundary = rescale_snapshot(sf, 0.5, {0.0, 0.0});
  const auto grid = SphereGrid::circle(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(extract_graph(boundary, grid));
}
BENCHMARK(BM_ExtractGraph)->Arg(64)->Arg(128);

void BM_NonlinearRemainder(benchmark::State& state) {
  const auto grid = SphereGrid::circle(64);
  const auto samples = random_graph_samples(7, 1, grid, 16, 2, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(nonlinear_remainder(samples.front(), 4));
}
BENCHMARK(BM_NonlinearRemainder);

void BM_ArrivalDisk(benchmark::State& state) {
  const auto grid = square_grid(static_cast<int>(state.range(0)), {0.0, 0.0}, 1.1);
  const auto domain = disk_domain(grid, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_arrival(domain));
}
BENCHMARK(BM_ArrivalDisk)->Arg(96)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
