#include "magspec/magop.hpp"

#include "magspec/diagnostics.hpp"
#include "magspec/parallel.hpp"

#include <cmath>
#include <sstream>

namespace magspec {

std::string to_string(BoundaryCondition bc) { return bc == BoundaryCondition::Neumann ? "neumann" : "dirichlet"; }

BoundaryCondition boundary_condition_from_string(const std::string& s) {
    if (s == "neumann") return BoundaryCondition::Neumann;
    if (s == "dirichlet") return BoundaryCondition::Dirichlet;
    throw InvalidArgument("unknown boundary condition '" + s + "'");
}

DiscreteMagneticOperator::DiscreteMagneticOperator(std::shared_ptr<const Grid> grid, BoundaryCondition bc, double q,
                                                   std::vector<double> link_phase)
    : grid_(std::move(grid)), bc_(bc), q_(q), phase_(std::move(link_phase)) {
    const Grid& g = *grid_;
    if (phase_.size() != g.links().size()) throw InvalidArgument("one phase per grid link is required");
    const double ih2 = 1.0 / (g.h() * g.h());
    const int n = static_cast<int>(g.size());
    diag_.setZero(n);
    for (int a = 0; a < n; ++a) {
        const int missing = g.missing_neighbours(a);
        const int interior = 2 * g.dimension() - missing;
        diag_[a] = ih2 * (bc_ == BoundaryCondition::Dirichlet ? interior + missing : interior);
    }
    std::vector<Eigen::Triplet<cplx, int>> trip;
    trip.reserve(n + 2 * g.links().size());
    for (int a = 0; a < n; ++a) trip.emplace_back(a, a, cplx(diag_[a], 0.0));
    for (std::size_t l = 0; l < g.links().size(); ++l) {
        const auto& link = g.links()[l];
        const cplx e = std::polar(ih2, -phase_[l]);
        trip.emplace_back(link.a, link.b, -e);
        trip.emplace_back(link.b, link.a, -std::conj(e));
    }
    H_.resize(n, n);
    H_.setFromTriplets(trip.begin(), trip.end());
    H_.makeCompressed();
}

double DiscreteMagneticOperator::form(const CVector& u) const {
    const Grid& g = *grid_;
    double s = 0.0;
    for (std::size_t l = 0; l < g.links().size(); ++l) {
        const auto& link = g.links()[l];
        s += std::norm(u[link.b] - std::polar(1.0, phase_[l]) * u[link.a]);
    }
    if (bc_ == BoundaryCondition::Dirichlet)
        for (std::size_t a = 0; a < g.size(); ++a) s += g.missing_neighbours(a) * std::norm(u[a]);
    return s * std::pow(g.h(), g.dimension() - 2);
}

double DiscreteMagneticOperator::norm_sq(const CVector& u) const { return u.squaredNorm() * grid_->cell_volume(); }

DiscreteMagneticOperator assemble(const Domain& dom, const FieldSpec& A, double q, BoundaryCondition bc,
                                  std::shared_ptr<const Grid> grid, const AssemblyOptions& opts) {
    if (!grid) throw InvalidArgument("assemble needs a grid");
    if (q < 0) throw InvalidArgument("coupling q must be nonnegative");
    if (grid->size() == 0) throw DiscretizationError("empty interior");
    if (grid->dimension() != dom.dimension()) throw InvalidArgument("grid and domain dimensions differ");
    const double h = grid->h();
    if (q > 0) {
        const double len = 1.0 / std::sqrt(q);
        if (h > len) {
            std::ostringstream os;
            os << "grid under-resolves the magnetic length: h=" << h << " > 1/sqrt(q)=" << len;
            throw DiscretizationError(os.str());
        }
        if (h > 0.5 * len) warn("grid spacing exceeds half the magnetic length 1/sqrt(q)");
    }
    const auto& links = grid->links();
    std::vector<double> phase(links.size());
    const Grid& g = *grid;
    parallel_for(links.size(), opts.threads, [&](std::size_t l) {
        phase[l] = q * A.line_integral(g.position(links[l].a), g.position(links[l].b));
    });
    return DiscreteMagneticOperator(std::move(grid), bc, q, std::move(phase));
}

DiscreteMagneticOperator assemble(const Domain& dom, const FieldSpec& A, double q, BoundaryCondition bc,
                                  const Grid& grid, const AssemblyOptions& opts) {
    return assemble(dom, A, q, bc, std::make_shared<const Grid>(grid), opts);
}

double rayleigh(const DiscreteMagneticOperator& op, const CVector& u) {
    if (u.size() != static_cast<Eigen::Index>(op.size())) throw InvalidArgument("vector size mismatch");
    const double uu = u.squaredNorm();
    if (!(uu > 0)) throw InvalidArgument("rayleigh quotient of a zero vector");
    const cplx num = u.dot(op.apply(u)); // conjugates u
    if (std::abs(num.imag()) > 1e-10 * std::max(std::abs(num.real()), uu))
        throw Error("rayleigh quotient has a non-negligible imaginary part");
    return num.real() / uu;
}

} // namespace magspec
