#include <benchmark/benchmark.h>

#include "sjx/steady.hpp"

using namespace sjx;

namespace {

JunctionSpec junction() {
    JunctionSpec j;
    j.J_S = 0.01;
    j.Delta = 0.01;
    j.gamma = 0.01;
    return j;
}

BathSpec bath(Polarization p) {
    BathSpec b;
    b.Jz = 0.9;
    b.polarization = p;
    return b;
}

} // namespace

static void BM_BuildRedfieldGlobal(benchmark::State& state) {
    const auto left = lead_kernels(bath(Polarization::up));
    const auto right = lead_kernels(bath(Polarization::down));
    for (auto _ : state) {
        auto gen = build_redfield_global(junction(), left, right);
        benchmark::DoNotOptimize(gen.total(0, 0));
    }
}
BENCHMARK(BM_BuildRedfieldGlobal)->Unit(benchmark::kMicrosecond);

static void BM_SolveSteady(benchmark::State& state) {
    auto gen = build_redfield_global(junction(), lead_kernels(bath(Polarization::up)),
                                     lead_kernels(bath(Polarization::down)));
    for (auto _ : state) {
        auto rep = solve_steady(gen);
        benchmark::DoNotOptimize(rep.residual);
    }
}
BENCHMARK(BM_SolveSteady)->Unit(benchmark::kMicrosecond);

static void BM_FullSteadyPipeline(benchmark::State& state) {
    for (auto _ : state) {
        auto rep = steady_state_global(junction(), bath(Polarization::up),
                                       bath(Polarization::down));
        benchmark::DoNotOptimize(rep.current);
    }
}
BENCHMARK(BM_FullSteadyPipeline)->Unit(benchmark::kMicrosecond);
