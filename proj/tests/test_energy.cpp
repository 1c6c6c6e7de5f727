#include "doctest.h"

#include "porehom/energy.hpp"
#include "porehom/errors.hpp"

#include <cmath>
#include <random>

using namespace porehom;

TEST_CASE("double well values") {
    FreeEnergy fe = double_well(1.0);
    CHECK(fe.f(1.0) == doctest::Approx(0.0));
    CHECK(fe.f(-1.0) == doctest::Approx(0.0));
    CHECK(fe.f(0.0) == 0.0);
    CHECK(fe.F(1.0) == doctest::Approx(0.0));
    CHECK(fe.F(-1.0) == doctest::Approx(0.0));
    CHECK(fe.f(2.0) == doctest::Approx(6.0)); // u^3 - u at 2
    CHECK(fe.f_prime(0.0) == doctest::Approx(-1.0));

    FreeEnergy half = double_well(0.5);
    CHECK(half.F(0.0) == doctest::Approx(1.0)); // 1/(4*0.25)
}

TEST_CASE("double well rejects nonpositive width") {
    CHECK_THROWS_AS(double_well(0.0), Error);
    CHECK_THROWS_AS(double_well(-1.0), Error);
}

TEST_CASE("validate_pf") {
    CHECK(!validate_pf(double_well(1.0)).has_value());

    SUBCASE("negative leading coefficient") {
        FreeEnergy fe = make_free_energy(2, {0.0, 1.0, 0.0, -1.0}, 1.0, 1.0);
        auto v = validate_pf(fe);
        REQUIRE(v.has_value());
        CHECK(v->find("leading") != std::string::npos);
    }
    SUBCASE("broken linkage") {
        FreeEnergy fe = double_well(1.0);
        fe.b[2] += 0.25; // 2*b2 != a1
        auto v = validate_pf(fe);
        REQUIRE(v.has_value());
        CHECK(v->find("linkage") != std::string::npos);
    }
    SUBCASE("nonzero f(0)") {
        FreeEnergy fe = double_well(1.0);
        fe.a[0] = 0.1;
        auto v = validate_pf(fe);
        REQUIRE(v.has_value());
        CHECK(v->find("f(0)") != std::string::npos);
    }
}

TEST_CASE("f_prime matches a centered finite difference at random points") {
    std::mt19937 rng(20240901u);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    // a generic admissible r=3 polynomial alongside the double well
    FreeEnergy gen = make_free_energy(3, {0.0, -1.5, 0.4, 2.0, -0.3, 0.9}, 1.0, 1.0);
    REQUIRE(!validate_pf(gen).has_value());
    for (const FreeEnergy& fe : {double_well(0.7), gen}) {
        for (int t = 0; t < 20; ++t) {
            const double u = uni(rng);
            const double h = 1e-6;
            const double fd = (fe.f(u + h) - fe.f(u - h)) / (2.0 * h);
            CHECK(std::abs(fd - fe.f_prime(u)) <=
                  1e-6 * std::max(1.0, std::abs(fe.f_prime(u))));
        }
    }
}

TEST_CASE("F' equals f (linkage), by finite differences") {
    std::mt19937 rng(7u);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    FreeEnergy fe = double_well(0.8);
    for (int t = 0; t < 20; ++t) {
        const double u = uni(rng);
        const double h = 1e-6;
        const double Fp = (fe.F(u + h) - fe.F(u - h)) / (2.0 * h);
        CHECK(std::abs(Fp - fe.f(u)) <= 1e-6 * std::max(1.0, std::abs(fe.f(u))));
    }
}

TEST_CASE("coercivity: f(s) s >= 2r b_2r s^2r - C on a sampled grid") {
    for (const FreeEnergy& fe :
         {double_well(1.0), make_free_energy(3, {0.0, -1.5, 0.4, 2.0, -0.3, 0.9}, 1.0, 1.0)}) {
        const double lead = 2.0 * fe.r * fe.b[2 * fe.r];
        double C_needed = 0.0;
        for (int i = 0; i <= 2000; ++i) {
            const double s = -10.0 + 20.0 * i / 2000.0;
            const double lhs = fe.f(s) * s;
            const double rhs = lead * std::pow(s, 2 * fe.r);
            C_needed = std::max(C_needed, rhs - lhs);
        }
        CHECK(std::isfinite(C_needed));
        // the slack stays below the leading term's own scale at the edge of
        // the sampled range, so the bound is not vacuous there
        CHECK(C_needed < lead * std::pow(10.0, 2 * fe.r));
    }
}
