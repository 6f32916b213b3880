#pragma once

#include "magspec/degennes.hpp"
#include "magspec/domains.hpp"
#include "magspec/eigensolver.hpp"
#include "magspec/fields.hpp"
#include "magspec/grid.hpp"
#include "magspec/magop.hpp"

#include <boost/rational.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace magspec::bounds {

using Rational = boost::rational<long long>;

struct BoundParams {
    double epsilon = 0.125; ///< lower-bound exponent, in (0, 1/2)
    double delta = 1.0 / 3; ///< upper-bound exponent, in (0, 1/2)
    double C = 1.0;         ///< empirical constant slot
    double q0 = 0.0;        ///< validity threshold slot
    void validate() const;
};

/// Theta0 q - C (q^{1-2eps} + (1 + |grad B|) q^{1/2+2eps}).
double lower_bound_rhs(double q, const BoundParams& p, const SeminormReport& s, double theta0);
/// Theta0 q + C (q^{2d} + |B|_{C1}^2 q^{2-4d} + |B|_{C1} q^{1-d} + |B|_{C2} q^{3/2-3d} + |B|_{C2}^2 q^{2-6d}).
double upper_bound_rhs(double q, const BoundParams& p, const SeminormReport& s, double theta0);

/// Power of q in each correction term (x enters as the helical tau-growth exponent).
std::vector<Rational> lower_remainder_exponents(Rational epsilon, Rational x = 0);
std::vector<Rational> upper_remainder_exponents(Rational delta, Rational x = 0);
/// Largest correction exponent; the bound improves on the leading term only if it is < 1.
Rational leading_exponent(const std::vector<Rational>& exps);
bool lower_bound_informative(double epsilon);
bool upper_bound_informative(double delta);

struct Exponents {
    double epsilon;
    double delta;
};
struct ExactExponents {
    Rational epsilon;
    Rational delta;
};
/// 2 eps = 1/4 - x/2 and delta = (1 + x)/3, for 0 <= x < 1/2.
Exponents choose_exponents(double x);
ExactExponents choose_exponents(Rational x);

/// Relative rates of the helical sandwich: lower (1/4 - x/2), upper (1/3 - 2x/3).
struct RatePair {
    Rational lower;
    Rational upper;
};
RatePair helical_rates(Rational x);
/// Large-domain rates 1/(4(1+2y)) and 1/(3(1+2y)).
RatePair large_domain_rates(Rational y);

struct RatioBounds {
    double lower;
    double upper;
};

/// Sandwich for mu*(q, tau)/(q tau); requires tau <= c0 (q tau)^x.
RatioBounds helical_ratio_bounds(double qtau, double tau, double x, double c0, double C, double theta0);

enum class UpperSign { Plus, Minus };
/// Sandwich for mu_{Omega_R}(q)/q; requires R <= c0 q^y. The displayed upper bound
/// carries a minus sign that contradicts the fixed-domain upper bound; Plus is the default.
RatioBounds large_domain_ratio_bounds(double q, double R, double y, double c0, double C, double theta0,
                                      UpperSign sign = UpperSign::Plus);

/// Dirichlet lower bound 1 - C (q^{-2eps} + |grad B| q^{-(1/2-2eps)}) for mu0/q.
double dirichlet_ratio_lower_bound(double q, double epsilon, double sup_gradB, double C);

// Quasimode

/// C2 cut-off: 1 on [0, 1], quintic descent on [1, 2], 0 after.
double cutoff(double s);

struct QuasimodeSpec {
    TangentPoint tangent;
    double delta = 1.0 / 3;
    double q = 0.0;
    std::shared_ptr<const degennes::DeGennesMinimum> model;
    /// Factor a in chi(a q^delta y); the literal construction uses 4.
    double cutoff_scale = 4.0;
};

struct Quasimode {
    CVector values; ///< unit discrete L2 norm
    double support_radius = 0.0;
    double truncation_mass = 0.0;
    std::size_t support_nodes = 0;
    double field_intensity = 1.0;
};

/// Boundary trial state in chart coordinates, gauged to the grid potential.
Quasimode build_quasimode(const QuasimodeSpec& spec, const Domain& dom, const FieldSpec& A, const Grid& grid);

struct BoundReport {
    double q = 0.0;
    double lower_rhs = 0.0;
    double upper_rhs = 0.0;
    std::optional<double> computed_mu;
    std::optional<double> quasimode_rayleigh;
    std::optional<double> residual;
    double truncation_mass = 0.0;
    SeminormReport seminorms;

    /// lower_rhs <= mu <= certificate + residual slack, where present.
    bool consistent(double slack = 0.0) const;
};

struct CertificateOptions {
    double cutoff_scale = 4.0;
    BoundParams params;
    bool solve = false; ///< also compute mu(q, A) with the eigensolver
    EigenOptions eigen;
    int seminorm_samples = 4096;
};

BoundReport quasimode_certificate(const Domain& dom, const FieldPtr& A, double q, double delta,
                                  std::shared_ptr<const Grid> grid,
                                  std::shared_ptr<const degennes::DeGennesMinimum> model,
                                  const CertificateOptions& opts = {});

// Helical orbit

/// Field seen in the plane through `center` orthogonal to B(center), for the
/// normalized helical member Q n_tau Q^t / tau: again a normalized helical field.
FieldPtr helical_cross_section(double tau, const Rotation& Q, const Vec3& center);

struct HelicalOptions {
    EigenOptions eigen;
    int threads = 1;
};

struct HelicalMuStar {
    double qtau = 0.0;
    double mu_star = 0.0; ///< min over samples of mu(q tau, n / tau)
    std::size_t argmin = 0;
    Rotation argmin_rotation;
    std::vector<double> values;
    std::vector<double> residuals;
    bool all_converged = true;
};

/// 2D domains use the cross-section reduction, 3D domains the full field.
HelicalMuStar helical_mu_star(double q, double tau, const std::vector<Rotation>& rotations, const Domain& dom,
                              std::shared_ptr<const Grid> grid, const HelicalOptions& opts = {});

// Dilation

struct LargeDomainMu {
    double mu_direct = 0.0;
    double mu_rescaled = 0.0;
    double gap = 0.0; ///< relative
    double residual_direct = 0.0;
    double residual_rescaled = 0.0;
    bool converged = false; ///< both solves
};

/// Eigenvalue on the dilated domain versus the rescaled problem on the reference domain,
/// on matched grids (the dilated grid is `grid` scaled about x0).
LargeDomainMu large_domain_mu(double q, double R, const FieldPtr& A, const Domain& dom, const Vec3& x0,
                              std::shared_ptr<const Grid> grid, const EigenOptions& eigen = {});

} // namespace magspec::bounds
