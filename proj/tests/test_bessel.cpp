#include <doctest.h>

#include <cmath>

#include "sjx/bessel.hpp"

using namespace sjx;

TEST_CASE("J0 against the standard library across both evaluation branches") {
    // std::cyl_bessel_j is an independent implementation; agreement at 1e-10
    // covers the series branch, the asymptotic branch, and the switch point.
    for (double x : {0.0, 1e-8, 0.3, 1.0, 2.0, 5.0, 9.0, 11.9, 12.0, 12.1,
                     15.0, 30.0, 100.0, 1000.0, 8000.0}) {
        CHECK(std::abs(bessel_j0(x) - std::cyl_bessel_j(0.0, x)) < 1e-10);
    }
}

TEST_CASE("J0 frozen values") {
    CHECK(bessel_j0(0.0) == 1.0);
    CHECK(bessel_j0(2.0) == doctest::Approx(0.2238907791412357).epsilon(1e-12));
    CHECK(bessel_j0(-2.0) == doctest::Approx(0.2238907791412357).epsilon(1e-12));
}

TEST_CASE("J1 against the standard library") {
    for (double x : {0.0, 0.5, 2.0, 11.0, 13.0, 40.0, 500.0}) {
        CHECK(std::abs(bessel_j1(x) - std::cyl_bessel_j(1.0, x)) < 1e-10);
        CHECK(std::abs(bessel_j1(-x) + bessel_j1(x)) < 1e-15);
    }
}

TEST_CASE("Miller recurrence array matches direct J0, J1") {
    for (double x : {0.2, 1.0, 3.0, 7.5, 20.0}) {
        auto j = bessel_j_array(x, 12);
        CHECK(std::abs(j[0] - bessel_j0(x)) < 1e-12);
        CHECK(std::abs(j[1] - bessel_j1(x)) < 1e-12);
        CHECK(std::abs(j[5] - std::cyl_bessel_j(5.0, x)) < 1e-12);
    }
}

TEST_CASE("J_k(0) is the Kronecker delta") {
    auto j = bessel_j_array(0.0, 4);
    CHECK(j[0] == 1.0);
    for (int k = 1; k <= 4; ++k) CHECK(j[k] == 0.0);
}
