#include <benchmark/benchmark.h>

#include "nrpos/tdoa.hpp"
#include "nrpos/timing.hpp"

namespace {

using namespace nrpos;

void BM_EstimatePosition(benchmark::State& state) {
  GnbDeployment dep;
  dep.positions = {{0, 0}, {50, 0}, {25, 43.30127018922193}};
  const Position2D ue{22, 14};
  std::vector<tdoa::RstdRecord> rstds;
  for (int j = 2; j <= 3; ++j) {
    rstds.push_back(tdoa::make_rstd_record(j, timing::true_rstd(dep.gnb(j), dep.gnb(1), ue), 0.0));
  }
  for (auto _ : state) benchmark::DoNotOptimize(tdoa::estimate_position(dep, rstds));
}
BENCHMARK(BM_EstimatePosition);

}  // namespace
