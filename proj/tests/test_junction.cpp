#include <doctest.h>

#include <cmath>

#include "sjx/junction.hpp"

using namespace sjx;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

JunctionSpec spec(double js, double d, double jz = 0.0, double g = 0.01) {
    JunctionSpec j;
    j.J_S = js;
    j.Delta = d;
    j.Jz_sys = jz;
    j.gamma = g;
    return j;
}

} // namespace

TEST_CASE("build_hs with all couplings zero is the zero matrix") {
    CHECK(max_abs(build_hs(spec(0.0, 0.0)).mat) == 0.0);
}

TEST_CASE("build_hs detuning only: diag(0, -2d, +2d, 0)") {
    const double d = 0.31;
    auto h = build_hs(spec(0.0, d));
    Eigen::Vector4d expect(0.0, -2.0 * d, 2.0 * d, 0.0);
    for (int i = 0; i < 4; ++i) {
        CHECK(h.mat(i, i).real() == doctest::Approx(expect(i)));
    }
    CHECK(max_abs(h.mat - Eigen::MatrixXcd(h.mat.diagonal().asDiagonal())) == 0.0);
}

TEST_CASE("build_hs hopping only: eigenvalues {-2Js, 0, 0, 2Js}") {
    const double js = 0.7;
    auto es = eigensystem(build_hs(spec(js, 0.0)));
    CHECK(es.energies(0) == doctest::Approx(-2.0 * js));
    CHECK(es.energies(1) == doctest::Approx(0.0));
    CHECK(es.energies(2) == doctest::Approx(0.0));
    CHECK(es.energies(3) == doctest::Approx(2.0 * js));
}

TEST_CASE("build_hs commutes with total magnetization") {
    auto h = build_hs(spec(0.4, 0.2, 0.3));
    auto ztot = junction_z(Side::left) + junction_z(Side::right);
    CHECK(max_abs(h.mat * ztot.mat - ztot.mat * h.mat) < 1e-12);
}

TEST_CASE("mirror map conjugates H_S by the swap operator") {
    auto h = build_hs(spec(0.4, 0.2, 0.3));
    auto hm = build_hs(spec(0.4, -0.2, 0.3));
    Eigen::Matrix4cd swap = Eigen::Matrix4cd::Zero();
    swap(0, 0) = swap(3, 3) = 1.0;
    swap(1, 2) = swap(2, 1) = 1.0; // |01> <-> |10>
    CHECK(max_abs(swap * h.mat * swap - hm.mat) < 1e-14);
}

TEST_CASE("jump set: hopping-only spec has K only at omega = +-2Js") {
    const double js = 0.5;
    auto set = build_jump_set(spec(js, 0.0));
    for (const auto& k : set.ops) {
        CHECK(std::abs(std::abs(k.omega) - 2.0 * js) < 1e-9);
    }
    CHECK(!set.ops.empty());
}

TEST_CASE("jump set: no zero-frequency jump operators in generic specs") {
    for (auto s : {spec(0.5, 0.0), spec(0.3, 0.17, 0.23), spec(0.01, 0.01, 0.9)}) {
        auto set = build_jump_set(s);
        for (const auto& k : set.ops) {
            CHECK(std::abs(k.omega) > 1e-9);
        }
    }
}

TEST_CASE("jump set completeness: sum over omega rebuilds K_0 = S+ + S") {
    auto set = build_jump_set(spec(0.3, 0.17, 0.23));
    for (Side s : {Side::left, Side::right}) {
        Eigen::Matrix4cd sum = Eigen::Matrix4cd::Zero();
        for (const auto& k : set.ops) {
            if (k.side == s && k.alpha == 0) sum += k.mat;
        }
        const Eigen::MatrixXcd sig = junction_sigma(s).mat;
        CHECK(max_abs(sum - (sig.adjoint() + sig)) < 1e-12);
    }
}

TEST_CASE("defining eigenoperator property of every K(omega)") {
    auto s = spec(0.3, 0.17, 0.23);
    auto set = build_jump_set(s);
    auto h = build_hs(s);
    const double t = 0.77;
    for (const auto& k : set.ops) {
        auto moved = heisenberg(Operator{junction_space(), k.mat}, h, t);
        const cplx phase = std::exp(cplx(0.0, -k.omega * t));
        CHECK(max_abs(moved.mat - phase * k.mat) < 1e-10);
    }
}

TEST_CASE("current operator is Hermitian with tr j^2 = 32 gamma^2") {
    const double g = 0.37;
    auto j = current_operator(Side::left, g);
    CHECK(j.is_hermitian(1e-14));
    CHECK((j * j).trace().real() == doctest::Approx(32.0 * g * g));
    CHECK(std::abs((j * j).trace().imag()) < 1e-14);
}

TEST_CASE("current operator expectation vanishes in a product state") {
    auto j = current_operator(Side::left, 0.2);
    Eigen::Vector4cd up_down = Eigen::Vector4cd::Zero();
    up_down(2) = 1.0; // |1>_B |0>_S
    const cplx v = up_down.adjoint() * j.mat * up_down;
    CHECK(std::abs(v) == 0.0);
}

TEST_CASE("system_corr_down basics") {
    auto s = spec(0.4, 0.3);
    CHECK(system_corr_down(0.0, s) == cplx(1.0, 0.0));
    auto s0 = spec(0.4, 0.0);
    for (double t : {0.3, 1.4}) {
        CHECK(std::abs(system_corr_down(t, s0) - cplx(std::cos(2.0 * s0.J_S * t), 0.0)) <
              1e-14);
    }
}

TEST_CASE("system_corr_down matches the Heisenberg-evolution oracle") {
    // includes nonzero Jz_sys, where the closed form carries an extra phase
    for (auto s : {spec(0.4, 0.3), spec(0.05, 0.9), spec(0.4, 0.3, 0.6)}) {
        auto h = build_hs(s);
        auto sL = junction_sigma(Side::left);
        Eigen::Vector4cd down = Eigen::Vector4cd::Zero();
        down(0) = 1.0;
        for (double t : {0.0, 0.4, 1.9, 7.3}) {
            auto sLt = heisenberg(sL, h, t);
            const cplx oracle = down.adjoint() * (sLt.mat * sL.mat.adjoint()) * down;
            CHECK(std::abs(system_corr_down(t, s) - oracle) < 1e-12);
        }
    }
}

TEST_CASE("degenerate detuning pair: Delta=0, Js=0 collapses frequencies") {
    auto set = build_jump_set(spec(0.0, 0.0, 0.4));
    // H = Jz Z_L Z_R: levels {-Jz (x2), +Jz (x2)}, frequencies {0, +-2Jz}
    CHECK(set.eigen.level_energies.size() == 2);
    REQUIRE(set.eigen.frequencies.size() == 3);
    CHECK(set.eigen.frequencies[1] == doctest::Approx(0.0));
}
