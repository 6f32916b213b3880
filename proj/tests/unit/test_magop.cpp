#include "helpers.hpp"

#include "magspec/diagnostics.hpp"
#include "magspec/eigensolver.hpp"
#include "magspec/magop.hpp"

#include <doctest.h>

#include <cmath>

using namespace magspec;

namespace {

std::shared_ptr<const Grid> grid_for(const Domain& d, double h) { return std::make_shared<const Grid>(Grid::build(d, h)); }

CVector random_vector(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    CVector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx(nd(rng), nd(rng));
    return v;
}

double max_abs(const SparseMatrix& M) {
    double m = 0;
    for (int k = 0; k < M.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(M, k); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

constexpr double j01_sq = 5.783185962946784; // first Dirichlet eigenvalue of the unit disk

} // namespace

TEST_SUITE("magop") {
    TEST_CASE("Hermitian assembly with nonnegative diagonal") {
        const auto disk = Domain::disk(Vec3::Zero(), 1.0);
        const auto g = grid_for(disk, 0.05);
        const auto A = gauge_shifted(linear_potential(Vec3::UnitZ()), Polynomial3::random(3, 3, 0.5));
        for (auto bc : {BoundaryCondition::Neumann, BoundaryCondition::Dirichlet}) {
            const auto op = assemble(disk, *A, 25.0, bc, g);
            const SparseMatrix D = op.matrix() - SparseMatrix(op.matrix().adjoint());
            CHECK(max_abs(D) == 0.0);
            CHECK(op.diagonal().minCoeff() >= 0.0);
            const CVector u = random_vector(op.size(), 4);
            const double direct = (u.dot(op.apply(u))).real() * g->cell_volume();
            CHECK(op.form(u) == doctest::Approx(direct).epsilon(1e-12));
        }
    }

    TEST_CASE("q = 0 reduces to the graph Laplacian") {
        const auto disk = Domain::disk(Vec3::Zero(), 1.0);
        const auto g = grid_for(disk, 0.05);
        const auto op = assemble(disk, *linear_potential(Vec3::UnitZ()), 0.0, BoundaryCondition::Neumann, g);
        for (int k = 0; k < op.matrix().outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(op.matrix(), k); it; ++it) CHECK(it.value().imag() == 0.0);
        const CVector one = CVector::Ones(static_cast<Eigen::Index>(op.size()));
        CHECK(op.apply(one).norm() < 1e-9);
        CHECK(std::abs(rayleigh(op, one)) < 1e-12);
        const auto er = lowest_eigenpair(op, 1e-8, 2000);
        CHECK(std::abs(er.lambda) <= 1e-8);
    }

    TEST_CASE("Dirichlet Laplacian of the unit disk converges to j01^2") {
        // the staircase boundary gives O(h) error; it must shrink under refinement
        const auto disk = Domain::disk(Vec3::Zero(), 1.0);
        double prev = 1e300;
        for (double h : {0.04, 0.02}) {
            const auto op =
                assemble(disk, *linear_potential(Vec3::UnitZ()), 0.0, BoundaryCondition::Dirichlet, grid_for(disk, h));
            const double err = std::abs(lowest_eigenpair(op, 1e-9, 3000).lambda - j01_sq);
            CHECK(err < prev);
            CHECK(err < 0.1 * j01_sq);
            prev = err;
        }
    }

    TEST_CASE("discrete gauge invariance") {
        const auto disk = Domain::disk(Vec3::Zero(), 1.0);
        const auto g = grid_for(disk, 0.05);
        const auto base = linear_potential(Vec3::UnitZ());
        const double q = 10.0;
        const auto op = assemble(disk, *base, q, BoundaryCondition::Neumann, g);
        const double lam = lowest_eigenpair(op).lambda;
        for (unsigned seed : {1u, 2u}) {
            const auto phi = Polynomial3::random(seed, 3, 1.0);
            const auto op2 = assemble(disk, *gauge_shifted(base, phi), q, BoundaryCondition::Neumann, g);
            // H' = U H U^* with U = diag(exp(i q phi))
            CVector ph(static_cast<Eigen::Index>(g->size()));
            for (std::size_t n = 0; n < g->size(); ++n) ph[n] = std::polar(1.0, q * phi(g->position(n)));
            double worst = 0;
            for (int k = 0; k < op.matrix().outerSize(); ++k)
                for (SparseMatrix::InnerIterator it(op.matrix(), k); it; ++it) {
                    const cplx expect = ph[it.row()] * it.value() * std::conj(ph[it.col()]);
                    worst = std::max(worst, std::abs(op2.matrix().coeff(it.row(), it.col()) - expect));
                }
            CHECK(worst <= 1e-12 * max_abs(op.matrix()));
            CHECK(std::abs(lowest_eigenpair(op2).lambda - lam) <= 1e-10 * lam);
        }
    }

    TEST_CASE("link phases discretize (i grad + qA)^2 on plane waves") {
        // constant A: plane wave e^{ik.x} has symbol sum (2 - 2 cos((k - qA)_j h)) / h^2
        const auto disk = Domain::disk(Vec3::Zero(), 1.0);
        const auto g = grid_for(disk, 0.02);
        const Vec3 a(0.3, -0.2, 0.0);
        const auto A = polynomial_field({Polynomial3::constant(a[0]), Polynomial3::constant(a[1]), {}});
        const double q = 2.0;
        const auto op = assemble(disk, *A, q, BoundaryCondition::Neumann, g);
        const Vec3 k(1.5, 0.7, 0.0);
        CVector u(static_cast<Eigen::Index>(g->size()));
        for (std::size_t n = 0; n < g->size(); ++n) u[n] = std::polar(1.0, k.dot(g->position(n)));
        const CVector Hu = op.apply(u);
        const double h = g->h();
        double symbol = 0;
        for (int j = 0; j < 2; ++j) symbol += (2 - 2 * std::cos((k[j] - q * a[j]) * h)) / (h * h);
        int checked = 0;
        for (std::size_t n = 0; n < g->size(); ++n) {
            if (g->missing_neighbours(n) != 0) continue;
            CHECK(std::abs(Hu[n] - symbol * u[n]) < 1e-8);
            ++checked;
        }
        CHECK(checked > 100);
        CHECK(symbol == doctest::Approx((k - q * a).squaredNorm()).epsilon(1e-3));
    }

    TEST_CASE("resolution guard") {
        const auto disk = Domain::disk(Vec3::Zero(), 1.0);
        const auto A = linear_potential(Vec3::UnitZ());
        CHECK_THROWS_AS(assemble(disk, *A, 400.0, BoundaryCondition::Neumann, grid_for(disk, 0.06)),
                        DiscretizationError);
        const long before = warning_count();
        set_warning_sink([](const std::string&) {});
        (void)assemble(disk, *A, 100.0, BoundaryCondition::Neumann, grid_for(disk, 0.08));
        set_warning_sink(nullptr);
        CHECK(warning_count() > before);
    }

    TEST_CASE("rayleigh quotient") {
        const auto disk = Domain::disk(Vec3::Zero(), 1.0);
        const auto g = grid_for(disk, 0.05);
        const auto op = assemble(disk, *linear_potential(Vec3::UnitZ()), 10.0, BoundaryCondition::Neumann, g);
        CHECK_THROWS_AS(rayleigh(op, CVector::Zero(static_cast<Eigen::Index>(op.size()))), InvalidArgument);
        const auto er = lowest_eigenpair(op);
        CHECK(rayleigh(op, er.vector) == doctest::Approx(er.lambda).epsilon(1e-12));
        for (unsigned s = 0; s < 5; ++s) CHECK(rayleigh(op, random_vector(op.size(), s)) >= er.lambda - er.residual);
    }

    TEST_CASE("partition of unity") {
        const auto disk = Domain::disk(Vec3::Zero(), 1.0);
        const auto g = grid_for(disk, 0.02);
        const auto single = make_partition(std::vector<Vec3>{Vec3::Zero()}, g, 5.0);
        for (std::size_t n = 0; n < g->size(); ++n) CHECK(single.chi(0, g->position(n)) == doctest::Approx(1.0));
        const auto p = make_partition(disk, g, 0.4);
        CHECK(p.size() > 4);
        CHECK(p.normalization_defect() <= 1e-12);
        const auto p2 = make_partition(disk, g, 0.2);
        CHECK(p2.normalization_defect() <= 1e-12);
        // r |grad chi_j| is scale free: the constants agree across radii
        CHECK(std::sqrt(p.single_gradient_constant()) ==
              doctest::Approx(std::sqrt(p2.single_gradient_constant())).epsilon(0.25));
        CHECK(p.single_gradient_constant() <= p.gradient_constant());
        CHECK_THROWS_AS(make_partition(disk, g, 0.05), DiscretizationError);
        CHECK_THROWS_AS(make_partition(disk, g, 3.0), InvalidArgument);
    }

    TEST_CASE("IMS localization formula") {
        const auto disk = Domain::disk(Vec3::Zero(), 1.0);
        const auto A = linear_potential(Vec3::UnitZ());
        {
            // u supported where one cut-off is identically 1
            const auto g = grid_for(disk, 0.02);
            const auto p = make_partition(std::vector<Vec3>{Vec3(-0.5, 0, 0), Vec3(0.5, 0, 0)}, g, 1.2);
            const auto op = assemble(disk, *A, 10.0, BoundaryCondition::Neumann, g);
            CVector u = CVector::Zero(static_cast<Eigen::Index>(g->size()));
            for (std::size_t n = 0; n < g->size(); ++n) {
                const double r = (g->position(n) - Vec3(-0.85, 0, 0)).norm();
                if (r < 0.1) u[n] = std::pow(std::cos(pi * r / 0.2), 4);
            }
            const auto rep = verify_ims(op, p, u);
            CHECK(rep.gap <= 1e-10 * std::max(1.0, rep.lhs));
        }
        // constant u at q = 0: first-order decay of the gap
        double gaps[2];
        int i = 0;
        for (double h : {0.02, 0.01}) {
            const auto g = grid_for(disk, h);
            const auto p = make_partition(disk, g, 0.4);
            const auto op = assemble(disk, *A, 0.0, BoundaryCondition::Neumann, g);
            const CVector one = CVector::Ones(static_cast<Eigen::Index>(g->size()));
            const auto rep = verify_ims(op, p, one);
            CHECK(std::abs(rep.lhs) < 1e-9);
            gaps[i++] = rep.gap / rep.norm_sq;
        }
        CHECK(gaps[1] < 0.6 * gaps[0]);
    }
}
