#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "sjx/chain.hpp"
#include "sjx/trajectory.hpp"

using namespace sjx;

namespace {

ChainSpec spec_for(int sites_per_lead) {
    ChainSpec c;
    c.n_left = c.n_right = sites_per_lead;
    c.junction.J_S = 0.01;
    c.junction.Delta = 0.01;
    c.junction.gamma = 0.01;
    c.bath_left.Jz = 1.0;
    c.bath_right.Jz = 1.0;
    return c;
}

} // namespace

static void BM_ChainApplyFloat(benchmark::State& state) {
    flush_denormals();
    const auto spec = spec_for(static_cast<int>(state.range(0)));
    const auto ham = build_chain_hamiltonian(spec);
    std::vector<std::complex<float>> in(ham.dim()), out(ham.dim());
    for (std::size_t s = 0; s < in.size(); ++s) {
        in[s] = {static_cast<float>(s % 13) * 0.05f, 0.2f};
    }
    for (auto _ : state) {
        chain_apply(ham, in.data(), out.data());
        benchmark::DoNotOptimize(out.data());
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(ham.dim()) * 16);
}
BENCHMARK(BM_ChainApplyFloat)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_UnitaryStep(benchmark::State& state) {
    flush_denormals();
    const auto spec = spec_for(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto tr = evolve_unitary(spec, 0.1, 0.1, 1e-8);
        benchmark::DoNotOptimize(tr.current.back());
    }
}
BENCHMARK(BM_UnitaryStep)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_TrajectoryMacro(benchmark::State& state) {
    flush_denormals();
    const auto spec = spec_for(static_cast<int>(state.range(0)));
    AbsorberSpec a;
    TrajectoryOptions o;
    o.dt_noise = 0.05;
    o.dt_unitary = 0.4;
    o.T = 0.4;
    o.sample_dt = 0.4;
    o.cheb_tol = 1e-4;
    o.record_junction_rho = false;
    o.record_total_z = false;
    std::uint64_t idx = 0;
    for (auto _ : state) {
        auto tr = evolve_trajectory(spec, a, a, o, idx++);
        benchmark::DoNotOptimize(tr.current.back());
    }
}
BENCHMARK(BM_TrajectoryMacro)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
