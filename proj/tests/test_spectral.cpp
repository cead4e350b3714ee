#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sjx/errors.hpp"
#include "sjx/spectral.hpp"
#include "sjx/steady.hpp"

using namespace sjx;

namespace {

JunctionSpec junction(double js, double d, double jz = 0.0, double g = 0.01) {
    JunctionSpec j;
    j.J_S = js;
    j.Delta = d;
    j.Jz_sys = jz;
    j.gamma = g;
    return j;
}

BathSpec bath(double jz, Polarization pol) {
    BathSpec b;
    b.J = 1.0;
    b.Jz = jz;
    b.mu = 100.0;
    b.polarization = pol;
    return b;
}

CurrentTrace constant_trace(double value, double T, double dt,
                            const std::string& tag = "steady") {
    CurrentTrace tr;
    tr.method = tag;
    for (double t = 0.0; t <= T + 1e-12; t += dt) {
        tr.times.push_back(t);
        tr.total.push_back(value);
        tr.left.push_back(value);
        tr.right.push_back(-value);
    }
    return tr;
}

const JunctionSpec kPaper = junction(0.01, 0.01, 0.0, 0.01);

} // namespace

TEST_CASE("pi kernel at tau = 0 matches direct operator averages") {
    auto rep = steady_state_global(kPaper, bath(0.5, Polarization::up),
                                   bath(0.5, Polarization::down));
    auto left = lead_kernels(bath(0.5, Polarization::up));
    auto right = lead_kernels(bath(0.5, Polarization::down));
    auto pi = stationary_pi_kernel(rep.rho, kPaper, left, right, 0.01, 50.0);

    cplx expect(0.0, 0.0);
    for (int s = 0; s < 2; ++s) {
        const auto& kern = (s == 0) ? left : right;
        const double sgn = (s == 0) ? 0.5 : -0.5;
        const Eigen::Matrix4cd sig =
            junction_sigma(s == 0 ? Side::left : Side::right).mat;
        const cplx cp0 = kern.particle.zero ? cplx(0, 0) : kern.particle.eval(0.0);
        const cplx ch0 = kern.hole.zero ? cplx(0, 0) : kern.hole.eval(0.0);
        const cplx w = cp0 * (sig.adjoint() * sig * rep.rho).trace() -
                       ch0 * (sig * sig.adjoint() * rep.rho).trace();
        expect += sgn * cplx(0.0, -1.0) * (w + std::conj(w));
    }
    CHECK(std::abs(pi.values.front() - expect) < 1e-12);
}

TEST_CASE("pi kernel is purely imaginary and carries no gamma") {
    auto rep = steady_state_global(kPaper, bath(0.9, Polarization::up),
                                   bath(0.9, Polarization::down));
    auto left = lead_kernels(bath(0.9, Polarization::up));
    auto right = lead_kernels(bath(0.9, Polarization::down));
    auto pi = stationary_pi_kernel(rep.rho, kPaper, left, right, 0.01, 20.0);
    for (const auto& v : pi.values) CHECK(std::abs(v.real()) < 1e-14);

    auto strong = kPaper;
    strong.gamma = 0.07; // gamma sits in Eq-4's prefactor, not in Pi
    auto pi2 = stationary_pi_kernel(rep.rho, strong, left, right, 0.01, 20.0);
    for (std::size_t k = 0; k < pi.values.size(); ++k) {
        CHECK(pi.values[k] == pi2.values[k]);
    }
}

TEST_CASE("pi kernel cancels between sides for a symmetric unbiased setup") {
    auto sharp = CorrelationKernel::sharp_exponential(0.05);
    auto scaled = [&](double f) {
        auto k = sharp;
        for (auto& v : k.values) v *= f;
        return k;
    };
    LeadKernels lead{scaled(0.7), scaled(0.3)};
    auto j = junction(0.03, 0.0, 0.0, 0.05);
    auto gen = build_redfield_global(j, lead, lead);
    auto rep = solve_steady(gen);
    REQUIRE_FALSE(rep.degenerate);
    auto pi = stationary_pi_kernel(rep.rho, j, lead, lead, 0.01, 10.0);
    for (const auto& v : pi.values) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("spectral function: gap beyond the Heisenberg point, none below") {
    auto omegas = uniform_grid(-3.0, 3.0, 241);

    auto gapped_rep = steady_state_global(kPaper, bath(1.5, Polarization::up),
                                          bath(1.5, Polarization::down));
    auto gapped_pi = stationary_pi_kernel(
        gapped_rep.rho, kPaper, lead_kernels(bath(1.5, Polarization::up)),
        lead_kernels(bath(1.5, Polarization::down)), 0.01, 400.0);
    auto gapped = spectral_function(gapped_pi, 1e-3, omegas);
    const double peak =
        *std::max_element(gapped.values.begin(), gapped.values.end(),
                          [](double a, double b) { return std::abs(a) < std::abs(b); });
    const double at_zero = gapped.values[120]; // omega = 0
    CHECK(std::abs(at_zero) < 1e-2 * std::abs(peak));

    auto open_rep = steady_state_global(kPaper, bath(0.5, Polarization::up),
                                        bath(0.5, Polarization::down));
    auto open_pi = stationary_pi_kernel(
        open_rep.rho, kPaper, lead_kernels(bath(0.5, Polarization::up)),
        lead_kernels(bath(0.5, Polarization::down)), 0.01, 400.0);
    auto open = spectral_function(open_pi, 1e-3, omegas);
    CHECK(open.values[120] > 0.0);
}

TEST_CASE("asymptotic current: 8 gamma^2 A(0) tracks the GME steady current") {
    auto rep = steady_state_global(kPaper, bath(0.5, Polarization::up),
                                   bath(0.5, Polarization::down));
    auto pi = stationary_pi_kernel(rep.rho, kPaper,
                                   lead_kernels(bath(0.5, Polarization::up)),
                                   lead_kernels(bath(0.5, Polarization::down)),
                                   0.01, 500.0);
    auto a = spectral_function(pi, 1e-3, {0.0});
    const double i_spectral = 8.0 * kPaper.gamma * kPaper.gamma * a.values[0];
    CHECK(a.values[0] >= -1e-8);
    CHECK(std::abs(i_spectral - rep.current) < 0.10 * std::abs(rep.current));
}

TEST_CASE("spectral function rejects out-of-Nyquist requests and real kernels") {
    auto pi = CorrelationKernel::tabulated_from(
        std::vector<cplx>(101, cplx(0.0, -1.0)), 0.1);
    CHECK_THROWS_AS(spectral_function(pi, 1e-3, {100.0}), ValidationError);
    auto bad = CorrelationKernel::tabulated_from(
        std::vector<cplx>(101, cplx(1.0, 0.0)), 0.1);
    CHECK_THROWS_AS(spectral_function(bad, 1e-3, {0.0}), NumericError);
}

TEST_CASE("rectification of identical traces is zero") {
    auto tr = constant_trace(0.3, 10.0, 0.1);
    auto rep = rectification(tr, tr, 10.0, 0.0);
    CHECK(rep.rectification == 0.0);
    CHECK(rep.diode_factor == 0.0);
}

TEST_CASE("one-sided transport gives perfect rectification R = 1") {
    auto plus = constant_trace(0.4, 10.0, 0.1);
    auto minus = constant_trace(0.0, 10.0, 0.1);
    auto rep = rectification(plus, minus, 10.0, 0.1);
    CHECK(rep.rectification == doctest::Approx(1.0));
    CHECK(rep.diode_factor == doctest::Approx(0.4));
}

TEST_CASE("rectification is antisymmetric under swapping the traces") {
    auto plus = constant_trace(0.5, 10.0, 0.1);
    auto minus = constant_trace(0.2, 10.0, 0.1);
    auto fwd = rectification(plus, minus, 10.0, 0.1);
    auto bwd = rectification(minus, plus, 10.0, -0.1);
    CHECK(fwd.rectification == doctest::Approx(-bwd.rectification));
    CHECK(fwd.diode_factor >= 0.0);
    CHECK(bwd.diode_factor >= 0.0);
    CHECK(std::abs(fwd.rectification) <= 1.0);
}

TEST_CASE("vanishing denominator is reported, not divided through") {
    auto plus = constant_trace(0.3, 10.0, 0.1);
    auto minus = constant_trace(-0.3, 10.0, 0.1);
    CHECK_THROWS_AS(rectification(plus, minus, 10.0, 0.1), NumericError);
}

TEST_CASE("kubo_rectification_closed values") {
    CHECK(kubo_rectification_closed(0.01, 0.0) == 0.0);
    CHECK(kubo_rectification_closed(0.01, 0.01) ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(kubo_rectification_closed(0.01, 10.0) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(kubo_rectification_closed(0.01, -0.01) ==
          doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
}
