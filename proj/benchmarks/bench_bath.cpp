#include <benchmark/benchmark.h>

#include "sjx/bath.hpp"
#include "sjx/bessel.hpp"

using namespace sjx;

static void BM_BesselJ0(benchmark::State& state) {
    double x = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bessel_j0(x));
        x += 1.7;
        if (x > 5000.0) x = 0.1;
    }
}
BENCHMARK(BM_BesselJ0);

static void BM_CorrXXNumeric(benchmark::State& state) {
    BathSpec s;
    s.Jz = 0.0;
    const double t = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(corr_xx_numeric(t, s));
    }
}
BENCHMARK(BM_CorrXXNumeric)->Arg(1)->Arg(10)->Arg(50);

static void BM_HalfFourier(benchmark::State& state) {
    auto k = CorrelationKernel::bessel(BathSpec{});
    k.tabulate(0.01, static_cast<double>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(half_fourier(k, 0.3, 1e-3).value);
    }
}
BENCHMARK(BM_HalfFourier)->Arg(500)->Arg(2000);
