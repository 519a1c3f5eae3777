#include <numbers>
#include <vector>

#include <benchmark/benchmark.h>

#include "dirac_tunnel/barrier_scattering.hpp"
#include "dirac_tunnel/quadrature.hpp"
#include "dirac_tunnel/transit_analysis.hpp"
#include "dirac_tunnel/wavepacket.hpp"

using namespace dirac_tunnel;

namespace {

const BarrierConfig kBarrier{1.0, 10.0, 1.0, 0.0};
const double kP0 = std::numbers::sqrt3 / 2.0;

PacketSpec spec() { return make_packet_spec(kP0, 10.0, kBarrier); }

}  // namespace

static void BM_TransmissionPolar(benchmark::State& state) {
  const BarrierConfig cfg{1.0, static_cast<double>(state.range(0)), 1.0, 0.0};
  double p = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(transmission_polar(p, cfg));
    p = p < 1.7 ? p + 1e-4 : 0.1;
  }
}
BENCHMARK(BM_TransmissionPolar)->Arg(10)->Arg(100);

static void BM_SolveMatching(benchmark::State& state) {
  double p = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_matching(p, kBarrier));
    p = p < 1.7 ? p + 1e-4 : 0.1;
  }
}
BENCHMARK(BM_SolveMatching);

static void BM_GaussLegendreRule(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(gauss_legendre(static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_GaussLegendreRule)->Arg(16)->Arg(64);

// One converged transmitted-packet amplitude; the node tables are warm.
static void BM_PacketEvaluate(benchmark::State& state) {
  const PacketEvaluator packet = PacketEvaluator::transmitted(spec(), kBarrier);
  const double t = static_cast<double>(state.range(0));
  benchmark::DoNotOptimize(packet.evaluate(10.0, t));
  for (auto _ : state) benchmark::DoNotOptimize(packet.evaluate(10.0, t));
}
BENCHMARK(BM_PacketEvaluate)->Arg(2)->Arg(70);

static void BM_FilterStats(benchmark::State& state) {
  const BarrierConfig cfg{1.0, static_cast<double>(state.range(0)), 1.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(filter_stats(spec(), cfg));
}
BENCHMARK(BM_FilterStats)->Arg(0)->Arg(50);

static void BM_ScanPeaks(benchmark::State& state) {
  const double l = static_cast<double>(state.range(0));
  const BarrierConfig cfg{1.0, l, 1.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(scan_peaks(l, spec(), cfg));
}
BENCHMARK(BM_ScanPeaks)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
