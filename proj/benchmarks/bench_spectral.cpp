#include <benchmark/benchmark.h>

#include "snls/norms.hpp"
#include "snls/propagator.hpp"

namespace {

void BM_FftRoundTrip1d(benchmark::State& state) {
  auto grid = snls::SpectralGrid::make(1, static_cast<int>(state.range(0)),
                                       8.0 * 3.141592653589793);
  snls::GridField f(grid);
  for (std::size_t i = 0; i < f.size(); ++i)
    f.values[i] = snls::Complex(std::sin(0.1 * i), std::cos(0.2 * i));
  for (auto _ : state) {
    auto hat = snls::spectrum(f);
    benchmark::DoNotOptimize(snls::from_spectrum(grid, hat));
  }
}
BENCHMARK(BM_FftRoundTrip1d)->Arg(64)->Arg(256)->Arg(1024);

void BM_FftRoundTrip3d(benchmark::State& state) {
  auto grid = snls::SpectralGrid::make(3, static_cast<int>(state.range(0)),
                                       4.0 * 3.141592653589793);
  snls::GridField f(grid);
  for (std::size_t i = 0; i < f.size(); ++i)
    f.values[i] = snls::Complex(std::sin(0.1 * i), std::cos(0.2 * i));
  for (auto _ : state) {
    auto hat = snls::spectrum(f);
    benchmark::DoNotOptimize(snls::from_spectrum(grid, hat));
  }
}
BENCHMARK(BM_FftRoundTrip3d)->Arg(8)->Arg(16)->Arg(32);

void BM_ApplyPropagator(benchmark::State& state) {
  auto grid = snls::SpectralGrid::make(1, 64, 8.0 * 3.141592653589793);
  snls::Propagator prop(grid);
  snls::GridField f(grid);
  for (std::size_t i = 0; i < f.size(); ++i)
    f.values[i] = snls::Complex(1.0 / (1.0 + i), 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(prop.apply(f, 1e-3));
}
BENCHMARK(BM_ApplyPropagator);

void BM_SobolevNorm(benchmark::State& state) {
  auto grid = snls::SpectralGrid::make(2, 64, 6.0);
  snls::GridField f(grid);
  for (std::size_t i = 0; i < f.size(); ++i)
    f.values[i] = snls::Complex(std::sin(0.01 * i), 0.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(snls::sobolev_norm(f, 1.0));
}
BENCHMARK(BM_SobolevNorm);

}  // namespace
