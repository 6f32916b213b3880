#include "magspec/bounds.hpp"

#include "magspec/diagnostics.hpp"
#include "magspec/parallel.hpp"

#include <cmath>

namespace magspec::bounds {

double cutoff(double s) {
    s = std::abs(s);
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    const double t = s - 1.0;
    return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

Quasimode build_quasimode(const QuasimodeSpec& spec, const Domain& dom, const FieldSpec& A, const Grid& grid) {
    if (!spec.model) throw InvalidArgument("quasimode needs the half-line model minimum");
    if (!(spec.q > 0)) throw InvalidArgument("quasimode needs q > 0");
    if (!(spec.delta > 0 && spec.delta < 0.5)) throw InvalidArgument("delta must lie in (0, 1/2)");
    if (!(spec.cutoff_scale > 0)) throw InvalidArgument("cutoff scale must be positive");
    if (spec.tangent.normal_flux > 1e-8) throw GeometryError("quasimode base point is not a tangent point");

    const Vec3 x0 = spec.tangent.x0;
    const Frame& fr = spec.tangent.frame;
    const int dim = dom.dimension();
    const Vec3 B0 = A.field(x0);
    const double b = dim == 2 ? std::abs(B0[2]) : (B0 - B0.dot(fr.normal) * fr.normal).norm();
    if (b < 1e-8) throw GeometryError("tangent frame undefined: tangential field vanishes");
    if (grid.h() > 0.5 / std::sqrt(spec.q * b)) warn("quasimode grid does not resolve the normal scale 1/sqrt(q)");

    const double s = spec.cutoff_scale * std::pow(spec.q, spec.delta);
    const double support = 2.0 / s;
    const ChartMap chart = boundary_chart(dom, x0, fr);
    if (support > chart.safe_radius) throw GeometryError("quasimode support exceeds the chart's safe radius");

    const double sq = std::sqrt(spec.q * b);
    const double xi0 = spec.model->xi0;
    const auto& u0 = spec.model->u0;

    // grid potential in chart coordinates minus the constant-field model (0, -b y3, 0);
    // its curl vanishes at the origin, so the radial gauge removes it up to O(|y|^2)
    auto residual_potential = [&](const Vec3& y) -> Vec3 {
        Vec3 At = chart.jacobian(y).transpose() * A.potential(chart.map(y));
        At[1] += b * y[2];
        return At;
    };

    Quasimode out;
    out.support_radius = support;
    out.field_intensity = b;
    out.values = CVector::Zero(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const Vec3 x = grid.position(n);
        const double d = grid.distances()[n];
        if (d >= support) continue;
        if ((x - x0).norm() > 4.0 * support) continue;
        const auto y = chart.inverse(x);
        if (!y) continue;
        const double tang = dim == 2 ? std::abs((*y)[1]) : std::hypot((*y)[0], (*y)[1]);
        if (tang >= support) continue;
        const double amp = u0.value_at(sq * (*y)[2]) * cutoff(s * (*y)[2]) * cutoff(s * tang);
        if (amp == 0.0) continue;
        const double phi = poincare_gauge(residual_potential, *y, Vec3::Zero(), 1e-12);
        out.values[n] = std::polar(amp, xi0 * sq * (*y)[1] + spec.q * phi);
        ++out.support_nodes;
    }
    const double nrm = std::sqrt(out.values.squaredNorm() * grid.cell_volume());
    if (!(nrm > 0)) throw DiscretizationError("quasimode support contains no grid node");
    out.values /= nrm;
    out.truncation_mass = degennes::ground_state_tail(u0, sq / s);
    return out;
}

BoundReport quasimode_certificate(const Domain& dom, const FieldPtr& A, double q, double delta,
                                  std::shared_ptr<const Grid> grid,
                                  std::shared_ptr<const degennes::DeGennesMinimum> model,
                                  const CertificateOptions& opts) {
    QuasimodeSpec spec;
    spec.tangent = find_tangent_point(dom, *A);
    spec.delta = delta;
    spec.q = q;
    spec.model = model;
    spec.cutoff_scale = opts.cutoff_scale;
    const Quasimode qm = build_quasimode(spec, dom, *A, *grid);
    const auto op = assemble(dom, *A, q, BoundaryCondition::Neumann, grid);

    BoundReport rep;
    rep.q = q;
    Box box = dom.bounding_box();
    rep.seminorms = seminorms(*A, box, opts.seminorm_samples);
    BoundParams p = opts.params;
    p.delta = delta;
    rep.lower_rhs = lower_bound_rhs(q, p, rep.seminorms, model->theta0);
    rep.upper_rhs = upper_bound_rhs(q, p, rep.seminorms, model->theta0);
    rep.quasimode_rayleigh = rayleigh(op, qm.values);
    rep.truncation_mass = qm.truncation_mass;
    if (opts.solve) {
        const auto er = lowest_eigenpair(op, opts.eigen);
        rep.computed_mu = er.lambda;
        rep.residual = er.residual;
    }
    return rep;
}

FieldPtr helical_cross_section(double tau, const Rotation& Q, const Vec3& center) {
    if (!(tau > 0)) throw InvalidArgument("cross-section needs tau > 0");
    const FieldPtr full = normalized_helical(tau, Q);
    const Vec3 e = full->field(center).normalized();
    const Rotation P = Rotation::aligning_e3_to(e);
    // shifting the argument of n_tau by w rotates it about e3 by tau w3
    const double w3 = (Q.matrix().transpose() * center)[2];
    const Rotation R3 = Rotation::from_axis_angle(Vec3::UnitZ(), tau * w3);
    return normalized_helical(tau, P.transpose() * Q * R3, center);
}

HelicalMuStar helical_mu_star(double q, double tau, const std::vector<Rotation>& rotations, const Domain& dom,
                              std::shared_ptr<const Grid> grid, const HelicalOptions& opts) {
    if (!(tau > 0)) throw InvalidArgument("helical scan needs tau > 0");
    if (rotations.empty()) throw InvalidArgument("helical scan needs at least one rotation");
    HelicalMuStar out;
    out.qtau = q * tau;
    out.values.assign(rotations.size(), 0.0);
    out.residuals.assign(rotations.size(), 0.0);
    std::vector<char> conv(rotations.size(), 0);
    const Vec3 c = dom.center();
    parallel_for(rotations.size(), opts.threads, [&](std::size_t i) {
        const FieldPtr A = dom.dimension() == 2 ? helical_cross_section(tau, rotations[i], c)
                                                : normalized_helical(tau, rotations[i]);
        const auto op = assemble(dom, *A, q * tau, BoundaryCondition::Neumann, grid);
        const auto er = lowest_eigenpair(op, opts.eigen);
        out.values[i] = er.lambda;
        out.residuals[i] = er.residual;
        conv[i] = er.converged ? 1 : 0;
    });
    out.argmin = static_cast<std::size_t>(std::min_element(out.values.begin(), out.values.end()) - out.values.begin());
    out.mu_star = out.values[out.argmin];
    out.argmin_rotation = rotations[out.argmin];
    out.all_converged = std::all_of(conv.begin(), conv.end(), [](char v) { return v != 0; });
    return out;
}

LargeDomainMu large_domain_mu(double q, double R, const FieldPtr& A, const Domain& dom, const Vec3& x0,
                              std::shared_ptr<const Grid> grid, const EigenOptions& eigen) {
    if (!(R > 0)) throw InvalidArgument("R must be positive");
    const Domain domR = scale_domain(dom, R, x0);
    auto gridR = std::make_shared<const Grid>(grid->scaled(R, x0, domR));
    const auto opR = assemble(domR, *A, q, BoundaryCondition::Neumann, gridR);
    const auto op = assemble(dom, *dilated(A, R, x0), q * R * R, BoundaryCondition::Neumann, grid);
    const auto eR = lowest_eigenpair(opR, eigen);
    EigenOptions e2 = eigen;
    e2.tol = eigen.tol * R * R;
    const auto e1 = lowest_eigenpair(op, e2);
    LargeDomainMu out;
    out.mu_direct = eR.lambda;
    out.mu_rescaled = e1.lambda / (R * R);
    out.gap = std::abs(out.mu_direct - out.mu_rescaled) / std::abs(out.mu_direct);
    out.residual_direct = eR.residual;
    out.residual_rescaled = e1.residual;
    out.converged = eR.converged && e1.converged;
    return out;
}

} // namespace magspec::bounds
