#include <benchmark/benchmark.h>

#include "snls/dynamics.hpp"

namespace {

snls::GridField smooth_data(snls::GridPtr grid) {
  const double L = grid->domain_length();
  std::vector<double> center(grid->dimension(), 0.5 * L);
  return snls::initial_data::gaussian_bump(grid, center, 1.5, 0.4);
}

void BM_DeterministicStep1d(benchmark::State& state) {
  auto grid = snls::SpectralGrid::make(1, 64, 8.0 * 3.141592653589793);
  auto spec = snls::NonlinearitySpec::mass_critical(1);
  snls::GridField u = smooth_data(grid);
  for (auto _ : state)
    benchmark::DoNotOptimize(u = snls::step_deterministic(u, spec, 1e-3));
}
BENCHMARK(BM_DeterministicStep1d);

void BM_SnlsTrajectory1d(benchmark::State& state) {
  auto grid = snls::SpectralGrid::make(1, 64, 8.0 * 3.141592653589793);
  auto spec = snls::NonlinearitySpec::mass_critical(1);
  auto op = snls::MultiplierOperator::decay(grid, 0.1, 1.0);
  snls::GridField u0 = smooth_data(grid);
  snls::SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_final = 0.1;
  cfg.snapshot_stride = 100;
  std::uint64_t stream = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(snls::solve_snls(
        u0, op, snls::NoiseStream(1, stream++), spec, cfg,
        snls::SolveOptions{.store_fields = false}));
  }
}
BENCHMARK(BM_SnlsTrajectory1d);

void BM_EnergyCriticalStep3d(benchmark::State& state) {
  auto grid = snls::SpectralGrid::make(3, 16, 4.0 * 3.141592653589793);
  auto spec = snls::NonlinearitySpec::energy_critical(3);
  snls::GridField u = smooth_data(grid);
  for (auto _ : state)
    benchmark::DoNotOptimize(u = snls::step_deterministic(u, spec, 1e-3));
}
BENCHMARK(BM_EnergyCriticalStep3d);

}  // namespace
