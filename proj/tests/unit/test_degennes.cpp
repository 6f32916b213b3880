#include "magspec/degennes.hpp"

#include <doctest.h>
#include <lapacke.h>

#include <cmath>
#include <vector>

using namespace magspec;
using namespace magspec::degennes;

namespace {

// Independent dense-tridiagonal oracle: LAPACK dstevx on the symmetrized matrix.
double lapack_lowest(double xi, double T, double h) {
    const int N = static_cast<int>(std::lround(T / h));
    std::vector<double> d(N), e(N - 1);
    for (int i = 0; i < N; ++i) {
        const double t = i * h;
        d[i] = 2.0 / (h * h) + (t + xi) * (t + xi);
    }
    for (int i = 0; i < N - 1; ++i) e[i] = -1.0 / (h * h);
    e[0] = -std::sqrt(2.0) / (h * h);
    int m = 0;
    std::vector<double> w(N), z(1);
    std::vector<lapack_int> ifail(N);
    const lapack_int info = LAPACKE_dstevx(LAPACK_COL_MAJOR, 'N', 'I', N, d.data(), e.data(), 0.0, 0.0, 1, 1, 0.0,
                                           &m, w.data(), z.data(), 1, ifail.data());
    REQUIRE(info == 0);
    return w[0];
}

} // namespace

// Frozen from the brute-force oracle run (T=20; golden section on the Rayleigh quotient).
constexpr double theta0_h1e3 = 0.5901061987;
constexpr double xi0_h1e3 = -0.76818360;
constexpr double theta0_extrapolated = 0.59010612;
constexpr double xi0_extrapolated = -0.76818366;

TEST_SUITE("degennes") {
    TEST_CASE("discretization validation") {
        CHECK(HalfLineDiscretization{20, 1e-3}.nodes() == 20000);
        CHECK_THROWS_AS(HalfLineDiscretization({20, 0.3}).validate(), InvalidArgument);
        CHECK_THROWS_AS(HalfLineDiscretization({-1, 1e-3}).validate(), InvalidArgument);
        CHECK(HalfLineDiscretization{20, 1e-3}.certified());
        CHECK_FALSE(HalfLineDiscretization{5, 1e-3}.certified());
    }

    TEST_CASE("mu at xi = 0 is the full-line oscillator energy") {
        const auto p = mu_of_xi(0.0, {20, 1e-3});
        CHECK(p.mu == doctest::Approx(1.0).epsilon(1e-6));
    }

    TEST_CASE("mu at xi = 2 exceeds xi squared") { CHECK(mu_of_xi(2.0, {20, 1e-2}).mu >= 4.0); }

    TEST_CASE("mu matches the LAPACK tridiagonal oracle") {
        for (double xi : {-1.5, -0.76818, 0.0, 1.0}) {
            const double ours = mu_of_xi(xi, {20, 1e-2}).mu;
            const double ref = lapack_lowest(xi, 20, 1e-2);
            CHECK(ours == doctest::Approx(ref).epsilon(1e-10));
        }
        CHECK(mu_of_xi(-0.76818, {20, 1e-3}).mu == doctest::Approx(0.5901).epsilon(1e-3 / 0.59));
    }

    TEST_CASE("ground state is normalized and positive") {
        const auto p = mu_of_xi(-0.7, {20, 1e-3});
        CHECK(ground_state_tail(p, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(ground_state_tail(p, p.T()) < 1e-14);
        double mn = 1e300;
        for (std::size_t i = 0; i + 1 < p.ground_state.size(); ++i) mn = std::min(mn, p.ground_state[i]);
        CHECK(mn > 0.0);
        CHECK(p.ground_state.back() == 0.0);
    }

    TEST_CASE("Richardson consistency and truncation") {
        for (double xi : {-1.2, -0.5, 0.3}) {
            const double a = mu_of_xi(xi, {20, 4e-3}).mu;
            const double b = mu_of_xi(xi, {20, 2e-3}).mu;
            const double c = mu_of_xi(xi, {20, 1e-3}).mu;
            // second order: halving h divides the error by 4
            CHECK((a - b) / (b - c) == doctest::Approx(4.0).epsilon(0.01));
            const double t10 = mu_of_xi(xi, {10, 2e-3}).mu;
            const double t20 = mu_of_xi(xi, {20, 2e-3}).mu;
            CHECK(std::abs(t10 - t20) <= 1e-10);
        }
        for (double xi : {0.0, 0.5, 1.5}) CHECK(mu_of_xi(xi, {20, 1e-2}).mu >= xi * xi);
    }

    TEST_CASE("minimizer and frozen anchors") {
        const auto m = minimize_mu({20, 1e-3}, 1e-6);
        CHECK(m.bracket.first < m.xi0);
        CHECK(m.xi0 < m.bracket.second);
        CHECK(m.bracket.second - m.bracket.first <= 1e-6);
        CHECK(m.theta0 > 0.5);
        CHECK(m.theta0 < 0.6);
        CHECK(m.theta0 == doctest::Approx(theta0_h1e3).epsilon(2e-10 / 0.59));
        CHECK(std::abs(m.xi0 - xi0_h1e3) < 1e-6);
        CHECK(mu_of_xi(m.xi0 - 0.1, m.disc).mu > m.theta0);
        CHECK(mu_of_xi(m.xi0 + 0.1, m.disc).mu > m.theta0);
        CHECK(std::abs(m.theta0 - m.xi0 * m.xi0) <= 1e-5);
        CHECK(m.theta0 < 1.0);
        CHECK(ground_state_tail(m.u0, 5.0) <= 1e-8);
    }

    TEST_CASE("extrapolated minimum") {
        const auto e = extrapolate_minimum({20, 1e-3}, 1e-7);
        CHECK(std::abs(e.theta0 - theta0_extrapolated) < 2e-8);
        CHECK(std::abs(e.xi0 - xi0_extrapolated) < 1e-6);
        CHECK(std::abs(e.theta0 - e.xi0 * e.xi0) <= 1e-6);
    }

    TEST_CASE("sampled curve is order independent") {
        const auto a = sample_curve(-2, 0, 9, {20, 1e-2}, 1);
        const auto b = sample_curve(-2, 0, 9, {20, 1e-2}, 3);
        REQUIRE(a.size() == 9);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].xi == b[i].xi);
            CHECK(a[i].mu == b[i].mu);
        }
    }

    TEST_CASE("coarse discretization is rejected") {
        CHECK_THROWS_AS(mu_of_xi(0.0, {2, 0.5}), DiscretizationError);
        CHECK_THROWS_AS(mu_of_xi(11.0, {20, 1e-2}), InvalidArgument);
        CHECK_THROWS_AS(minimize_mu({20, 1e-3}, 0.0), InvalidArgument);
    }
}
