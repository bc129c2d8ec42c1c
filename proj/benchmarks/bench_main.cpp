#include <benchmark/benchmark.h>

#include <cmath>

#include "capelast/config.hpp"
#include "capelast/elliptic.hpp"
#include "capelast/evolve.hpp"

using namespace capelast;

namespace {

VolumeField smooth(const Grid& g) {
  return sample(g, [](double x1, double x2, double z) { return std::exp(std::sin(x1) + z) * std::cos(x2); });
}

void BM_TangentialDerivative(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const Grid g = Grid::make(n, n, n / 2 + 1, 1.0);
  const VolumeField f = smooth(g);
  for (auto _ : st) benchmark::DoNotOptimize(d_tan(g, f, 1));
}
BENCHMARK(BM_TangentialDerivative)->Arg(16)->Arg(32)->Arg(64);

void BM_VerticalDerivative(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const Grid g = Grid::make(n, n, n / 2 + 1, 1.0);
  const VolumeField f = smooth(g);
  for (auto _ : st) benchmark::DoNotOptimize(d_vert(g, f));
}
BENCHMARK(BM_VerticalDerivative)->Arg(16)->Arg(32)->Arg(64);

void BM_PoissonSolve(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const Grid g = Grid::make(n, n, n / 2 + 1, 1.0);
  const SurfaceField psi = sample_surface(g, [](double x1, double x2) { return 0.1 * std::cos(x1) + 0.05 * std::sin(x2); });
  const GraphMap gm = build_graphmap(psi, g.surface(), make_polynomial_cutoff(g, 0.15), g);
  const PoissonSolver solver(g);
  const VolumeField rhs = smooth(g);
  for (auto _ : st) benchmark::DoNotOptimize(solver.solve(rhs, g.surface(), g.surface(), gm));
}
BENCHMARK(BM_PoissonSolve)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Rk4Step(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  RunConfig c = parse_config(R"(
[surface]
psi = mode 0.01 cos 1 0
[fields]
v = potential 0.1 cos 1 0
F1 = tangent 1 1 cos 1
[physics]
sigma = 0.1
)");
  c.init.nx = c.init.ny = n;
  c.init.nz = n / 2 + 1;
  const Grid g = Grid::make(c.init.nx, c.init.ny, c.init.nz, c.init.b);
  const Cutoff cut = make_spec_cutoff(c.init, g, sample_surface_recipe(g, c.init.psi));
  const State s = build_initial_data(c.init, g, cut);
  const Stepper stepper(g, cut);
  for (auto _ : st) benchmark::DoNotOptimize(stepper.step(s, 0.01));
}
BENCHMARK(BM_Rk4Step)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
