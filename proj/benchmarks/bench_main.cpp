#include <benchmark/benchmark.h>

#include <cstdint>

#include "zagff/extremes.hpp"
#include "zagff/greens.hpp"
#include "zagff/rng.hpp"
#include "zagff/rwalk.hpp"
#include "zagff/sampler.hpp"

namespace {

using namespace zagff;

void BM_GreenTable(benchmark::State& state) {
  const FieldConfig cfg(3, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(zero_average_green(cfg));
}
BENCHMARK(BM_GreenTable)->RangeMultiplier(2)->Range(8, 64)->Unit(benchmark::kMillisecond);

void BM_SampleField(benchmark::State& state) {
  const SpectralSampler sampler(FieldConfig(3, static_cast<int>(state.range(0))));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(++seed));
  state.SetItemsProcessed(state.iterations() * sampler.config().sites());
}
BENCHMARK(BM_SampleField)->RangeMultiplier(2)->Range(8, 64)->Unit(benchmark::kMillisecond);

void BM_ExtractPattern(benchmark::State& state) {
  const FieldConfig cfg(3, static_cast<int>(state.range(0)));
  const TorusField field = sample_field(cfg, 1);
  const auto constants = normalizing_constants(cfg.sites(), SpectralSampler(cfg).site_variance());
  for (auto _ : state) benchmark::DoNotOptimize(extract_point_pattern(field, constants));
}
BENCHMARK(BM_ExtractPattern)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_ExitWalk(benchmark::State& state) {
  const auto r = static_cast<Coord>(state.range(0));
  const Region box = Region::lattice_box({-r, -r, -r}, {r, r, r});
  const LatticePoint start = LatticePoint::origin(3);
  StreamRng rng(42);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_exit(box, start.coords(), rng));
}
BENCHMARK(BM_ExitWalk)->Arg(4)->Arg(16)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
