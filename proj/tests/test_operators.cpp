#include <doctest.h>

#include <cmath>
#include <random>

#include "sjx/errors.hpp"
#include "sjx/operators.hpp"

using namespace sjx;

namespace {

Operator random_hermitian(const HilbertSpace& sp, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd m(sp.dim, sp.dim);
    for (int i = 0; i < sp.dim; ++i) {
        for (int j = 0; j < sp.dim; ++j) m(i, j) = cplx(g(rng), g(rng));
    }
    return {sp, 0.5 * (m + Eigen::MatrixXcd(m.adjoint()))};
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("embed on a single site returns the local operator") {
    auto sp = HilbertSpace::qubits(1);
    auto z = embed(pauli_z(), "0", sp);
    CHECK(max_abs(z.mat - pauli_z()) == 0.0);
}

TEST_CASE("embed Z on two sites has spectrum {+1,+1,-1,-1}") {
    auto sp = HilbertSpace::qubits(2);
    auto z0 = embed(pauli_z(), "0", sp);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(z0.mat);
    Eigen::VectorXd e = es.eigenvalues();
    CHECK(e(0) == doctest::Approx(-1.0));
    CHECK(e(1) == doctest::Approx(-1.0));
    CHECK(e(2) == doctest::Approx(1.0));
    CHECK(e(3) == doctest::Approx(1.0));
}

TEST_CASE("tr[sigma+ sigma-] embedded on two sites equals 2") {
    auto sp = HilbertSpace::qubits(2);
    auto up = embed(sigma_plus(), "0", sp);
    auto dn = embed(sigma_minus(), "0", sp);
    CHECK(std::abs((up * dn).trace() - cplx(2.0, 0.0)) < 1e-14);
}

TEST_CASE("embed rejects unknown site labels") {
    auto sp = HilbertSpace::qubits(2);
    CHECK_THROWS_AS(embed(pauli_z(), "nope", sp), ValidationError);
}

TEST_CASE("site ordering: first label is the most significant factor") {
    auto sp = HilbertSpace::qubits(2);
    auto z0 = embed(pauli_z(), "0", sp);
    // basis {|00>,|01>,|10>,|11>}: Z on site 0 = diag(-1,-1,+1,+1)
    CHECK(z0.mat(0, 0).real() == doctest::Approx(-1.0));
    CHECK(z0.mat(1, 1).real() == doctest::Approx(-1.0));
    CHECK(z0.mat(2, 2).real() == doctest::Approx(1.0));
    CHECK(z0.mat(3, 3).real() == doctest::Approx(1.0));
}

TEST_CASE("heisenberg at t=0 is the identity map") {
    auto sp = HilbertSpace::qubits(2);
    auto op = random_hermitian(sp, 11);
    auto h = random_hermitian(sp, 22);
    CHECK(max_abs(heisenberg(op, h, 0.0).mat - op.mat) < 1e-13);
}

TEST_CASE("heisenberg of a commuting pair is constant") {
    auto sp = HilbertSpace::qubits(1);
    auto z = embed(pauli_z(), "0", sp);
    auto moved = heisenberg(z, z, 1.7);
    CHECK(max_abs(moved.mat - z.mat) < 1e-13);
}

TEST_CASE("heisenberg of sigma under Delta*Z picks up exp(-2i Delta t)") {
    auto sp = HilbertSpace::qubits(1);
    const double delta = 0.37;
    const double t = 2.1;
    auto h = Operator{sp, delta * pauli_z()};
    auto s = Operator{sp, sigma_minus()};
    auto moved = heisenberg(s, h, t);
    const cplx expect = std::exp(cplx(0.0, -2.0 * delta * t));
    CHECK(std::abs(moved.mat(0, 1) - expect) < 1e-13);
    CHECK(std::abs(moved.mat(1, 0)) < 1e-14);
}

TEST_CASE("heisenberg rejects non-Hermitian generators") {
    auto sp = HilbertSpace::qubits(1);
    auto s = Operator{sp, sigma_minus()};
    CHECK_THROWS_AS(heisenberg(s, s, 1.0), ValidationError);
}

TEST_CASE("heisenberg preserves the spectrum of Hermitian operators") {
    auto sp = HilbertSpace::qubits(2);
    auto op = random_hermitian(sp, 5);
    auto h = random_hermitian(sp, 6);
    auto moved = heisenberg(op, h, 0.83);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(op.mat), eb(moved.mat);
    CHECK((ea.eigenvalues() - eb.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("heisenberg composes: t1+t2 equals nested evolution") {
    auto sp = HilbertSpace::qubits(2);
    auto op = random_hermitian(sp, 7);
    auto h = random_hermitian(sp, 8);
    auto once = heisenberg(op, h, 0.9 + 0.4);
    auto twice = heisenberg(heisenberg(op, h, 0.4), h, 0.9);
    CHECK(max_abs(once.mat - twice.mat) < 1e-10);
}

TEST_CASE("eigensystem of diag(0, 2 Delta) has frequencies {-2d, 0, +2d}") {
    auto sp = HilbertSpace::qubits(1);
    const double d = 0.25;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(1, 1) = 2.0 * d;
    auto es = eigensystem(Operator{sp, m});
    REQUIRE(es.frequencies.size() == 3);
    CHECK(es.frequencies[0] == doctest::Approx(-2.0 * d));
    CHECK(es.frequencies[1] == doctest::Approx(0.0));
    CHECK(es.frequencies[2] == doctest::Approx(2.0 * d));
}

TEST_CASE("eigensystem merges near-degenerate frequencies") {
    auto sp = HilbertSpace::qubits(1);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(1, 1) = 1e-12; // splitting below the default tolerance
    auto es = eigensystem(Operator{sp, m});
    CHECK(es.level_energies.size() == 1);
    CHECK(es.frequencies.size() == 1);
}

TEST_CASE("eigensystem projector algebra and energy reconstruction") {
    auto sp = HilbertSpace::qubits(2);
    auto h = random_hermitian(sp, 42);
    auto es = eigensystem(h);

    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(sp.dim, sp.dim);
    Eigen::MatrixXcd rebuilt = Eigen::MatrixXcd::Zero(sp.dim, sp.dim);
    for (std::size_t i = 0; i < es.projectors.size(); ++i) {
        sum += es.projectors[i];
        rebuilt += es.level_energies[i] * es.projectors[i];
        for (std::size_t j = 0; j < es.projectors.size(); ++j) {
            Eigen::MatrixXcd prod = es.projectors[i] * es.projectors[j];
            if (i == j) {
                CHECK(max_abs(prod - es.projectors[i]) < 1e-12);
            } else {
                CHECK(max_abs(prod) < 1e-12);
            }
        }
    }
    CHECK(max_abs(sum - Eigen::MatrixXcd::Identity(sp.dim, sp.dim)) < 1e-12);
    CHECK(max_abs(rebuilt - h.mat) < 1e-10);
}

TEST_CASE("hermiticity verification flags small defects") {
    auto sp = HilbertSpace::qubits(1);
    Eigen::MatrixXcd m = pauli_z();
    m(0, 1) = 1e-10;
    CHECK_FALSE(Operator(sp, m).is_hermitian());
    CHECK(Operator(sp, pauli_z()).is_hermitian());
}
