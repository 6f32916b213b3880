#include "magspec/agmon.hpp"
#include "magspec/diagnostics.hpp"

#include <doctest.h>

#include <cmath>

using namespace magspec;
using namespace magspec::agmon;

TEST_SUITE("agmon") {
    TEST_CASE("admissible exponent") {
        CHECK(admissible_alpha(1.0, 2.0, 1.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
        CHECK_THROWS_AS(admissible_alpha(1.0, 1.0, 1.0), InvalidArgument);
        const double q = 1e4, theta0 = 0.5901061987;
        CHECK(admissible_alpha(theta0 * q, q, 1e-6) == doctest::Approx(main_rate(q, theta0)).epsilon(1e-6));
    }

    TEST_CASE("right-hand side") {
        CHECK(agmon_rhs(1.0, 3.0, 1.0, 1.0, 0.0, 1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
        CHECK(agmon_rhs(1.0, 3.0, 1.0, 1.0, 0.5, 2.0) == doctest::Approx(2 * agmon_rhs(1.0, 3.0, 1.0, 1.0, 0.5, 1.0)));
        const double amax = admissible_alpha(1.0, 3.0, 1.0);
        CHECK(agmon_rhs(1.0, 3.0, 1.0, 1.0, amax * (1 - 1e-8), 1.0) > 1e3);
        CHECK_THROWS_AS(agmon_rhs(1.0, 3.0, 1.0, 1.0, amax, 1.0), InvalidArgument);
    }

    TEST_CASE("weight") {
        const auto disk = Domain::disk(Vec3::Zero(), 1.0);
        const auto g = Grid::build(disk, 0.02);
        const auto w = make_weight(g, 0.2, 3.0);
        for (std::size_t n = 0; n < g.size(); ++n) {
            CHECK(w.eta[n] >= 0.0);
            CHECK(w.eta[n] <= 1.0);
            if (g.distances()[n] >= 0.2) CHECK(w.eta[n] == 1.0);
            if (g.distances()[n] <= 0.1) CHECK(w.eta[n] == 0.0);
        }
        CHECK(w.gradient_constant > 0.0);
        CHECK(w.gradient_constant < 10.0);
        CHECK(ramp(0.0) == 0.0);
        CHECK(ramp(1.0) == 1.0);
        CHECK_THROWS_AS(make_weight(g, 0.0, 1.0), InvalidArgument);
    }

    TEST_CASE("weighted norm") {
        const auto disk = Domain::disk(Vec3::Zero(), 1.0);
        const auto g = Grid::build(disk, 0.01);
        CVector shell = CVector::Zero(static_cast<Eigen::Index>(g.size()));
        for (std::size_t n = 0; n < g.size(); ++n)
            if (g.distances()[n] < 0.05) shell[n] = 1.0;
        const auto w = make_weight(g, 0.2, 2.0);
        CHECK(weighted_h1_norm(shell, w, disk, g) == doctest::Approx(0.0));
        // smooth interior function and a tiny gamma: plain H1 norm of |u|
        CVector u(static_cast<Eigen::Index>(g.size()));
        double l2 = 0;
        for (std::size_t n = 0; n < g.size(); ++n) {
            const double r2 = g.position(n).squaredNorm();
            u[n] = std::exp(-8 * r2);
            l2 += std::norm(u[n]) * g.cell_volume();
        }
        const double grad_sq = pi * (1 - 17 * std::exp(-16.0)); // int |grad e^{-8r^2}|^2 on the unit disk
        const double expect = std::sqrt(l2 + grad_sq);
        const auto w0 = make_weight(g, g.h(), 0.0);
        CHECK(weighted_h1_norm(u, w0, disk, g) == doctest::Approx(expect).epsilon(0.02));
        // e^{2 alpha d} overflows here while the norm itself does not
        const auto wbig = make_weight(g, 0.2, 600.0);
        const double big = weighted_h1_norm(u, wbig, disk, g);
        CHECK(std::isfinite(big));
        CHECK(std::log(big) > 500.0);
    }

    TEST_CASE("decay fits") {
        const auto disk = Domain::disk(Vec3::Zero(), 1.0);
        const auto g = Grid::build(disk, 0.005);
        CVector e(static_cast<Eigen::Index>(g.size())), c(static_cast<Eigen::Index>(g.size()));
        for (std::size_t n = 0; n < g.size(); ++n) {
            e[n] = std::exp(-5.0 * g.distances()[n]);
            c[n] = 1.0;
        }
        const auto re = fit_decay(e, disk, g, {0.05, 0.8}, 5.0);
        CHECK(re.fitted_slope == doctest::Approx(-5.0).epsilon(0.02));
        CHECK(re.shells_used >= 20);
        CHECK(re.ratio() == doctest::Approx(1.0).epsilon(0.02));
        const auto rc = fit_decay(c, disk, g, {0.0, 0.0});
        CHECK(std::abs(rc.fitted_slope) < 1e-12);
        CHECK_THROWS_AS(fit_decay(c, disk, g, {0.001, 0.5}), InvalidArgument);
        CHECK_THROWS_AS(fit_decay(c, disk, g, {0.05, 1.0}), InvalidArgument);
        CHECK_THROWS_AS(fit_decay(c, disk, g, {0.05, 0.1}), DiscretizationError);
        CHECK(boundary_mass_fraction(c, g, 2.0) == 1.0);
    }

    TEST_CASE("rate corrections") {
        CHECK(helical_rate_correction(256.0, 0.0) == doctest::Approx(std::pow(256.0, 0.375)));
        CHECK(large_domain_rate_correction(100.0, 1.0, 0.0) == doctest::Approx(std::pow(100.0, 0.375)));
        CHECK(main_rate(100.0, 0.5) == doctest::Approx(std::sqrt(50.0)));
    }
}
