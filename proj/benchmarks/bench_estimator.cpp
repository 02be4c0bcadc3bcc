#include <benchmark/benchmark.h>

#include "nrpos/channel.hpp"
#include "nrpos/estimator.hpp"
#include "nrpos/prs.hpp"

namespace {

using namespace nrpos;

prs::ResourceGrid reference() {
  prs::PrsConfig cfg;
  GnbDeployment dep;
  dep.positions = {{0, 0}, {50, 0}, {25, 43.3}};
  return prs::map_prs_to_grid(cfg, dep, 1, 3);
}

void BM_ApplyChannel(benchmark::State& state) {
  const auto ref = reference();
  const auto profile = channel::los_profile({0, 0}, {20, 10});
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(channel::apply_channel(ref, profile, {20.0, seed++}));
  }
}
BENCHMARK(BM_ApplyChannel);

void BM_Pipeline(benchmark::State& state) {
  const auto ref = reference();
  const auto profile = channel::los_profile({0, 0}, {20, 10});
  const int factor = static_cast<int>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const auto rx = channel::apply_channel(ref, profile, {20.0, seed++});
    const auto cfr = estimator::estimate_cfr(rx, ref);
    const auto cir = estimator::interpolate_cir(cfr, factor);
    benchmark::DoNotOptimize(estimator::detect_toa(cir, {}));
  }
}
BENCHMARK(BM_Pipeline)->Arg(1)->Arg(4)->Arg(16);

void BM_InterpolateCir(benchmark::State& state) {
  const auto ref = reference();
  const auto rx = channel::apply_channel(ref, channel::los_profile({0, 0}, {20, 10}), {20.0, 3});
  const auto cfr = estimator::estimate_cfr(rx, ref);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimator::interpolate_cir(cfr, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_InterpolateCir)->Arg(1)->Arg(16);

}  // namespace
