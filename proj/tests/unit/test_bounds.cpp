#include "magspec/bounds.hpp"

#include <doctest.h>

#include <cmath>

using namespace magspec;
using namespace magspec::bounds;

namespace {
constexpr double theta0 = 0.5901061987;
}

TEST_SUITE("bounds") {
    TEST_CASE("lower bound arithmetic") {
        BoundParams p;
        p.epsilon = 0.25;
        const auto s = SeminormReport::from_sups(1.0, 0.0, 0.0);
        CHECK(lower_bound_rhs(16.0, p, s, theta0) == doctest::Approx(16 * theta0 - 20).epsilon(1e-14));
        p.epsilon = 0.125;
        double prev = -1e300;
        for (double q : {1e4, 1e6, 1e8, 1e10}) {
            const double r = lower_bound_rhs(q, p, s, theta0) / q;
            CHECK(r < theta0);
            CHECK(r > prev);
            prev = r;
        }
        CHECK(leading_exponent(lower_remainder_exponents(Rational(1, 8))) == Rational(3, 4));
        CHECK_THROWS_AS(lower_bound_rhs(-1.0, p, s, theta0), InvalidArgument);
    }

    TEST_CASE("upper bound arithmetic") {
        BoundParams p;
        p.delta = 1.0 / 3;
        const auto s = SeminormReport::from_sups(1.0, 0.0, 0.0);
        REQUIRE(s.c1_norm_sq == 1.0);
        REQUIRE(s.c2_norm_sq == 1.0);
        CHECK(upper_bound_rhs(64.0, p, s, theta0) == doctest::Approx(64 * theta0 + 57).epsilon(1e-13));
        const auto e = upper_remainder_exponents(Rational(1, 3));
        CHECK(e[0] == e[2]);
        CHECK(leading_exponent(e) == Rational(2, 3));
        CHECK(upper_bound_informative(1.0 / 3));
        CHECK(leading_exponent(upper_remainder_exponents(Rational(1, 2))) == Rational(1));
        CHECK_FALSE(lower_bound_informative(0.25));
        CHECK(lower_bound_informative(0.125));
        p.delta = 0.5;
        CHECK_THROWS_AS(upper_bound_rhs(10.0, p, s, theta0), InvalidArgument);
    }

    TEST_CASE("exponent choice") {
        const auto e0 = choose_exponents(Rational(0));
        CHECK(e0.epsilon == Rational(1, 8));
        CHECK(e0.delta == Rational(1, 3));
        const auto e1 = choose_exponents(Rational(1, 4));
        CHECK(e1.epsilon == Rational(1, 16));
        CHECK(e1.delta == Rational(5, 12));
        const auto d = choose_exponents(0.25);
        CHECK(d.epsilon == doctest::Approx(1.0 / 16));
        CHECK(d.delta == doctest::Approx(5.0 / 12));
        CHECK_THROWS_AS(choose_exponents(0.5), InvalidArgument);
        CHECK_THROWS_AS(choose_exponents(Rational(-1, 10)), InvalidArgument);
        for (Rational x : {Rational(0), Rational(1, 10), Rational(1, 5), Rational(3, 8)}) {
            const auto r = helical_rates(x);
            CHECK(r.lower == Rational(1, 4) - x / 2);
            CHECK(r.upper == Rational(1, 3) - 2 * x / 3);
        }
    }

    TEST_CASE("large-domain rates and bounds") {
        auto r0 = large_domain_rates(Rational(0));
        CHECK(r0.lower == Rational(1, 4));
        CHECK(r0.upper == Rational(1, 3));
        auto r1 = large_domain_rates(Rational(1));
        CHECK(r1.lower == Rational(1, 12));
        CHECK(r1.upper == Rational(1, 9));
        // q R^2 = 1e4
        const auto b = large_domain_ratio_bounds(100.0, 10.0, 0.0, 10.0, 1.0, theta0);
        CHECK(b.lower == doctest::Approx(theta0 - 0.1).epsilon(1e-14));
        CHECK(b.upper > theta0);
        const auto m = large_domain_ratio_bounds(100.0, 10.0, 0.0, 10.0, 1.0, theta0, UpperSign::Minus);
        CHECK(m.upper < theta0);
        CHECK(m.upper == doctest::Approx(2 * theta0 - b.upper));
        CHECK_THROWS_AS(large_domain_ratio_bounds(100.0, 11.0, 0.0, 10.0, 1.0, theta0), RegimeError);
    }

    TEST_CASE("helical sandwich and regime guard") {
        const auto b = helical_ratio_bounds(100.0, 1.0, 0.0, 1.0, 1.0, theta0);
        CHECK(b.lower == doctest::Approx(theta0 - std::pow(100.0, -0.25)));
        CHECK(b.upper == doctest::Approx(theta0 + std::pow(100.0, -1.0 / 3)));
        CHECK_THROWS_AS(helical_ratio_bounds(100.0, 3.0, 0.0, 1.0, 1.0, theta0), RegimeError);
        CHECK_NOTHROW(helical_ratio_bounds(100.0, 3.0, 0.25, 1.0, 1.0, theta0));
        CHECK(dirichlet_ratio_lower_bound(1e8, 0.125, 0.0, 1.0) == doctest::Approx(1 - std::pow(1e8, -0.25)));
    }

    TEST_CASE("report consistency") {
        BoundReport r;
        r.lower_rhs = 1;
        r.upper_rhs = 5;
        CHECK(r.consistent());
        r.computed_mu = 2.0;
        r.quasimode_rayleigh = 1.9;
        r.residual = 0.05;
        CHECK_FALSE(r.consistent());
        CHECK(r.consistent(0.06));
        r.quasimode_rayleigh = 2.5;
        CHECK(r.consistent());
    }
}
