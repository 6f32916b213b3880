#include "helpers.hpp"

#include "magspec/domains.hpp"
#include "magspec/grid.hpp"

#include <doctest.h>

#include <cmath>

using namespace magspec;
using testutil::random_point;

namespace {

Vec3 fd_gradient(const Domain& d, const Vec3& x, double s = 1e-6) {
    Vec3 g;
    for (int k = 0; k < 3; ++k) {
        Vec3 e = Vec3::Zero();
        e[k] = s;
        g[k] = (d.signed_distance(x + e) - d.signed_distance(x - e)) / (2 * s);
    }
    return g;
}

Mat3 fd_jacobian(const ChartMap& c, const Vec3& y, double s = 1e-6) {
    Mat3 J;
    for (int k = 0; k < 3; ++k) {
        Vec3 e = Vec3::Zero();
        e[k] = s;
        J.col(k) = (c(y + e) - c(y - e)) / (2 * s);
    }
    return J;
}

} // namespace

TEST_SUITE("domains") {
    TEST_CASE("signed distance") {
        const auto ball = Domain::ball(Vec3::Zero(), 1.0);
        CHECK(ball.signed_distance(Vec3::Zero()) == 1.0);
        CHECK(std::abs(ball.signed_distance(Vec3(0.6, 0.8, 0))) < 1e-15);
        CHECK(ball.signed_distance(Vec3(2, 0, 0)) == doctest::Approx(-1.0));
        const auto ell = Domain::ellipsoid(Vec3::Zero(), Vec3(1, 1, 2));
        CHECK(ell.signed_distance(Vec3::Zero()) == doctest::Approx(1.0).epsilon(1e-10));
        // dense boundary sampling oracle at an off-centre point
        const Vec3 x(0.2, -0.1, 0.9);
        double best = 1e300;
        for (int i = 0; i <= 400; ++i)
            for (int j = 0; j < 800; ++j) {
                const double th = pi * i / 400, ph = 2 * pi * j / 800;
                const Vec3 b(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), 2 * std::cos(th));
                best = std::min(best, (b - x).norm());
            }
        CHECK(ell.signed_distance(x) == doctest::Approx(best).epsilon(1e-4));
        const auto disk = Domain::disk(Vec3(0.5, 0, 0), 2.0);
        CHECK(disk.dimension() == 2);
        CHECK(disk.signed_distance(Vec3(0.5, 1.0, 7.0)) == doctest::Approx(1.0));
    }

    TEST_CASE("distance is 1-Lipschitz and eikonal") {
        const auto ell = Domain::ellipsoid(Vec3(0.1, 0, 0), Vec3(1.0, 1.3, 0.8));
        std::mt19937_64 rng(4);
        for (int i = 0; i < 200; ++i) {
            const Vec3 a = random_point(rng, 1.2), b = random_point(rng, 1.2);
            CHECK(std::abs(ell.signed_distance(a) - ell.signed_distance(b)) <= (a - b).norm() * (1 + 1e-9));
        }
        int tested = 0;
        for (int i = 0; i < 400 && tested < 60; ++i) {
            const Vec3 x = random_point(rng, 1.0);
            const double d = ell.signed_distance(x);
            if (d <= 0.02 || d > 0.3) continue; // stay off the medial axis
            ++tested;
            const Vec3 g = fd_gradient(ell, x);
            CHECK(g.norm() == doctest::Approx(1.0).epsilon(1e-6));
            CHECK((g - ell.interior_normal(ell.project_to_boundary(x))).norm() < 1e-6);
        }
        CHECK(tested >= 20);
    }

    TEST_CASE("scaling") {
        const auto ball = Domain::ball(Vec3::Zero(), 1.0);
        const auto big = scale_domain(ball, 2.0, Vec3::Zero());
        const auto& b = std::get<Ball>(big.variant());
        CHECK(b.radius == 2.0);
        CHECK(b.center.norm() == 0.0);
        const auto ell = Domain::ellipsoid(Vec3(0.1, 0.2, 0), Vec3(1, 1.5, 0.7));
        const Vec3 x0(0.3, 0, 0.1);
        const auto ellR = scale_domain(ell, 3.0, x0);
        std::mt19937_64 rng(6);
        for (int i = 0; i < 30; ++i) {
            const Vec3 x = random_point(rng);
            CHECK(ellR.signed_distance(x0 + 3.0 * (x - x0)) ==
                  doctest::Approx(3.0 * ell.signed_distance(x)).epsilon(1e-9));
        }
        CHECK(ellR.volume() / ell.volume() == doctest::Approx(27.0));
        const auto disk = Domain::disk(Vec3::Zero(), 1.0);
        CHECK(scale_domain(disk, 2.0, Vec3::Zero()).volume() / disk.volume() == doctest::Approx(4.0));
    }

    TEST_CASE("tangent points") {
        const auto ball = Domain::ball(Vec3::Zero(), 1.0);
        const auto B = linear_potential(Vec3::UnitZ());
        const auto tp = find_tangent_point(ball, *B);
        CHECK(std::abs(tp.x0[2]) <= 1e-8);
        CHECK(tp.normal_flux <= 1e-8);
        CHECK(std::abs(ball.signed_distance(tp.x0)) < 1e-12);
        CHECK(std::abs(tp.frame.t1.dot(Vec3::UnitZ())) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK((tp.frame.t2 - tp.frame.normal.cross(tp.frame.t1)).norm() < 1e-12);

        const auto disk = Domain::disk(Vec3(1, 2, 0), 2.0);
        const auto td = find_tangent_point(disk, *B);
        CHECK((td.x0 - Vec3(3, 2, 0)).norm() < 1e-12);

        const auto ell = Domain::ellipsoid(Vec3::Zero(), Vec3(1, 1, 2));
        const auto te = find_tangent_point(ell, *B);
        CHECK(std::abs(ell.interior_normal(te.x0)[2]) <= 1e-8);
    }

    TEST_CASE("boundary charts") {
        const auto ball = Domain::ball(Vec3(0.1, 0, -0.2), 1.0);
        const auto tp = find_tangent_point(ball, *linear_potential(Vec3(0.2, 0.3, 1.0).normalized()));
        const auto c = boundary_chart(ball, tp.x0, tp.frame);
        CHECK((c(Vec3::Zero()) - tp.x0).norm() < 1e-12);
        Mat3 F;
        F << tp.frame.t1, tp.frame.t2, tp.frame.normal;
        CHECK((c.jacobian(Vec3::Zero()) - F).norm() < 1e-12);
        CHECK((c.jacobian(Vec3::Zero()).transpose() * c.jacobian(Vec3::Zero()) - Mat3::Identity()).norm() < 1e-10);
        const double gamma = 0.13;
        CHECK((c(Vec3(0, 0, gamma)) - (tp.x0 + gamma * tp.frame.normal)).norm() < 1e-12);
        CHECK(ball.signed_distance(c(Vec3(0, 0, gamma))) == doctest::Approx(gamma).epsilon(1e-12));

        std::mt19937_64 rng(9);
        double prev_ratio = 0;
        for (double r : {0.05, 0.1, 0.2}) {
            Vec3 y = random_point(rng, 1.0).normalized() * r;
            y[2] = std::abs(y[2]);
            CHECK(ball.signed_distance(c(y)) == doctest::Approx(y[2]).epsilon(1e-8));
            CHECK((c.jacobian(y) - fd_jacobian(c, y)).norm() < 1e-6);
            const auto back = c.inverse(c(y));
            REQUIRE(back.has_value());
            CHECK((*back - y).norm() < 1e-10);
            const Mat3 J = c.jacobian(y);
            prev_ratio = std::max(prev_ratio, (J.transpose() * J - Mat3::Identity()).norm() / r);
        }
        // metric deviation grows at most linearly with a curvature-sized constant
        CHECK(prev_ratio < 10.0 / ball.min_curvature_radius());

        const auto ell = Domain::ellipsoid(Vec3::Zero(), Vec3(1.0, 1.2, 2.0));
        const auto te = find_tangent_point(ell, *linear_potential(Vec3::UnitZ()));
        const auto ce = boundary_chart(ell, te.x0, te.frame);
        for (int i = 0; i < 10; ++i) {
            Vec3 y = random_point(rng, 0.15);
            y[2] = std::abs(y[2]);
            CHECK((ce.jacobian(y) - fd_jacobian(ce, y)).norm() < 1e-6);
        }
        CHECK_THROWS_AS(boundary_chart(ball, Vec3(0.1, 0, 0), tp.frame), GeometryError);
    }

    TEST_CASE("pullback of a constant field through a boundary chart") {
        const auto ball = Domain::ball(Vec3::Zero(), 1.0);
        const Vec3 B0(0, 0, 1);
        const auto A = linear_potential(B0);
        const auto tp = find_tangent_point(ball, *A);
        const auto c = boundary_chart(ball, tp.x0, tp.frame);
        auto At = [&](const Vec3& y) { return Vec3(c.jacobian(y).transpose() * A->potential(c(y))); };
        for (const Vec3& y : {Vec3(0.05, 0.02, 0.03), Vec3(-0.1, 0.07, 0.1)}) {
            const Vec3 ref = curl_fd(At, y, 1e-4).value;
            CHECK((pullback_field(c, B0, y) - ref).norm() < 1e-6);
        }
    }

    TEST_CASE("grid construction") {
        const auto disk = Domain::disk(Vec3::Zero(), 1.0);
        const auto g = Grid::build(disk, 0.05);
        CHECK(g.dimension() == 2);
        CHECK(g.size() > 0);
        CHECK(g.size() * g.cell_volume() == doctest::Approx(pi).epsilon(0.03));
        for (std::size_t n = 0; n < g.size(); ++n) CHECK(disk.signed_distance(g.position(n)) > 0);
        for (const auto& l : g.links()) {
            CHECK(g.lattice_index(l.b)[l.axis] == g.lattice_index(l.a)[l.axis] + 1);
        }
        const auto ball = Domain::ball(Vec3::Zero(), 1.0);
        const auto gb = Grid::build(ball, 0.1);
        CHECK(gb.dimension() == 3);
        for (std::size_t n = 0; n < gb.size(); ++n) {
            const auto& ix = gb.lattice_index(n);
            CHECK(gb.find(ix[0], ix[1], ix[2]) == static_cast<int>(n));
        }
        CHECK_THROWS(Grid::build(disk, 0.0));
        const auto gs = g.scaled(2.0, Vec3::Zero(), scale_domain(disk, 2.0, Vec3::Zero()));
        CHECK(gs.size() == g.size());
        CHECK(gs.h() == doctest::Approx(0.1));
    }
}
