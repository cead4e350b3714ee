#include <benchmark/benchmark.h>

#include "sjx/born.hpp"

using namespace sjx;

static void BM_BornIntegration(benchmark::State& state) {
    JunctionSpec j;
    j.J_S = 0.01;
    j.Delta = 0.01;
    j.gamma = 0.05;
    BathSpec up;
    up.Jz = 1.0;
    BathSpec dn = up;
    dn.polarization = Polarization::down;
    const auto left = lead_kernels(up);
    const auto right = lead_kernels(dn);
    BornOptions o;
    o.dt = 0.02;
    o.T = static_cast<double>(state.range(0));
    for (auto _ : state) {
        auto mh = integrate_born(junction_basis_state(0), j, left, right, o);
        benchmark::DoNotOptimize(mh.rho.back());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BornIntegration)->Arg(2)->Arg(8)->Arg(32)
    ->Unit(benchmark::kMillisecond)->Complexity();

static void BM_KuboFastPath(benchmark::State& state) {
    JunctionSpec j;
    j.J_S = 0.01;
    j.Delta = 0.01;
    j.gamma = 0.01;
    BathSpec up;
    up.Jz = 1.0;
    BathSpec dn = up;
    dn.polarization = Polarization::down;
    const auto left = lead_kernels(up);
    const auto right = lead_kernels(dn);
    const auto rho0 = junction_basis_state(0);
    for (auto _ : state) {
        auto tr = kubo_current(j, left, right, rho0, 0.01,
                               static_cast<double>(state.range(0)));
        benchmark::DoNotOptimize(tr.total.back());
    }
}
BENCHMARK(BM_KuboFastPath)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
