#include <benchmark/benchmark.h>

#include "snls/noise.hpp"

namespace {

void BM_SampleIncrement(benchmark::State& state) {
  auto grid = snls::SpectralGrid::make(1, static_cast<int>(state.range(0)),
                                       8.0 * 3.141592653589793);
  snls::NoiseStream stream(1, 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(stream.sample_increment(*grid, 1e-3));
}
BENCHMARK(BM_SampleIncrement)->Arg(64)->Arg(1024);

void BM_AdvanceConvolution(benchmark::State& state) {
  auto grid = snls::SpectralGrid::make(1, 64, 8.0 * 3.141592653589793);
  auto op = snls::MultiplierOperator::decay(grid, 0.1, 1.0);
  snls::ConvolutionState psi(grid, op, snls::NoiseStream(1, 0));
  for (auto _ : state) {
    psi.advance(5e-4);
    benchmark::DoNotOptimize(psi.l2_norm_squared());
  }
}
BENCHMARK(BM_AdvanceConvolution);

}  // namespace
