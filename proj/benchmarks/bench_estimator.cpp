#include <benchmark/benchmark.h>

#include <vector>

#include "spotvol/estimator.hpp"
#include "spotvol/kernel.hpp"
#include "spotvol/simulate.hpp"
#include "spotvol/wavelet.hpp"

namespace {

spotvol::ObservationSet make_obs(std::int64_t n) {
  const auto path =
      spotvol::simulate_path(spotvol::SineVol{}, nullptr, n, 4, 1234);
  return spotvol::add_noise(path, spotvol::constant_noise(0.01), 1234);
}

void BM_SimulatePath(benchmark::State& state) {
  const auto n = static_cast<std::int64_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto path =
        spotvol::simulate_path(spotvol::SineVol{}, nullptr, n, 16, seed++);
    benchmark::DoNotOptimize(path.x.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_SimulatePath)->Arg(1 << 14)->Arg(1 << 16);

void BM_PreAverage(benchmark::State& state) {
  const auto n = static_cast<std::int64_t>(state.range(0));
  const auto obs = make_obs(n);
  const auto kernel = spotvol::PreAveragingKernel::step();
  const std::int64_t m = 256;
  for (auto _ : state) {
    const auto zbar = spotvol::pre_average(obs, kernel, m);
    benchmark::DoNotOptimize(zbar.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_PreAverage)->Arg(1 << 16)->Arg(1 << 18);

void BM_Estimate(benchmark::State& state) {
  const auto n = static_cast<std::int64_t>(state.range(0));
  const auto obs = make_obs(n);
  const auto kernel = spotvol::PreAveragingKernel::step();
  const spotvol::WaveletBasis basis(spotvol::WaveletFamily::daubechies4);
  std::vector<double> grid(1025);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = i / 1024.0;
  for (auto _ : state) {
    const auto est = spotvol::estimate(obs, {}, kernel, basis, grid);
    benchmark::DoNotOptimize(est.values.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Estimate)->Arg(1 << 14)->Arg(1 << 16);

void BM_BasisConstruction(benchmark::State& state) {
  for (auto _ : state) {
    const spotvol::WaveletBasis basis(spotvol::WaveletFamily::daubechies4);
    benchmark::DoNotOptimize(&basis);
  }
}
BENCHMARK(BM_BasisConstruction);

}  // namespace

BENCHMARK_MAIN();
