#include <benchmark/benchmark.h>

#include "granoise/ensemble_stats.hpp"
#include "granoise/io/scenario.hpp"
#include "granoise/monte_carlo.hpp"
#include "granoise/noise_scaling.hpp"
#include "granoise/rng.hpp"
#include "granoise/spectroscopy.hpp"

using namespace granoise;

namespace {

const OperatingPoint& default_point() {
    static const OperatingPoint op = io::load_scenario(GRANOISE_SCENARIO_DIR "/paper-operating-point.json").base;
    return op;
}

void BM_WeakProbeAlpha(benchmark::State& state) {
    const FourLevelParams p = default_point().levels;
    double v = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(weak_probe_alpha(p, v));
        v += 1e-3;
    }
}
BENCHMARK(BM_WeakProbeAlpha);

void BM_WeakProbeKernel(benchmark::State& state) {
    const WeakProbeKernel kernel(default_point().levels);
    double v = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernel(v));
        v += 1e-3;
    }
}
BENCHMARK(BM_WeakProbeKernel);

void BM_SteadyState(benchmark::State& state) {
    const FourLevelParams p = default_point().levels_at_power();
    double v = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(steady_state(p, v));
        v += 1e-3;
    }
}
BENCHMARK(BM_SteadyState);

void BM_AlphaMoments(benchmark::State& state) {
    const OperatingPoint& op = default_point();
    const auto mode = state.range(0) ? ResponseMode::full : ResponseMode::weak_probe;
    const FourLevelParams p = op.levels_at_power();
    for (auto _ : state) benchmark::DoNotOptimize(alpha_moments(p, op.gas, mode, op.quadrature));
}
BENCHMARK(BM_AlphaMoments)->Arg(0)->Arg(1)->ArgNames({"full"})->Unit(benchmark::kMillisecond);

void BM_SampleChiBar(benchmark::State& state) {
    const OperatingPoint& op = default_point();
    RandomStream rng = SubstreamFactory(1).stream(0);
    for (auto _ : state)
        benchmark::DoNotOptimize(sample_chi_bar(rng, state.range(0), op.levels, op.gas, ResponseMode::weak_probe));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleChiBar)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_Sensitivity(benchmark::State& state) {
    const OperatingPoint& op = default_point();
    for (auto _ : state) benchmark::DoNotOptimize(sensitivity(op));
}
BENCHMARK(BM_Sensitivity)->Unit(benchmark::kMillisecond);

void BM_QuantumBoundary(benchmark::State& state) {
    const JOfR J(default_point());
    for (auto _ : state) benchmark::DoNotOptimize(quantum_advantage_boundary(J, 1e-6, 1e2));
}
BENCHMARK(BM_QuantumBoundary)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
