#pragma once

#include "magspec/domains.hpp"
#include "magspec/grid.hpp"
#include "magspec/types.hpp"

#include <utility>
#include <vector>

namespace magspec::agmon {

/// eta * exp(alpha d) with eta a C2 ramp from 0 at d = gamma/2 to 1 at d = gamma.
struct AgmonWeight {
    double gamma = 0.0;
    double alpha = 0.0;
    std::vector<double> eta; ///< per interior node
    double gradient_constant = 0.0; ///< sup |eta'| * gamma
};

double ramp(double t); ///< C2 quintic step on [0, 1]
AgmonWeight make_weight(const Grid& grid, double gamma, double alpha);

/// Supremum ((mu0 - mu)/(1 + eps))^{1/2}; admissible exponents are strictly smaller.
double admissible_alpha(double mu, double mu0, double eps);

/// Discrete H1 norm of eta e^{alpha d} |u| (forward differences on grid links);
/// evaluated in log space once alpha d exceeds 300.
double weighted_h1_norm(const CVector& u, const AgmonWeight& w, const Domain& dom, const Grid& grid);

/// C / sqrt(eps gamma) * ((mu0 + 1)/(mu0 - mu - (1 + eps) alpha^2))^{1/2} * e^{alpha gamma}.
double agmon_rhs(double mu, double mu0, double eps, double gamma, double alpha, double C);

struct Shell {
    double d;
    double max_abs_u;
};

struct DecayReport {
    double weighted_h1 = 0.0;
    double rhs_bound = 0.0;
    double fitted_slope = 0.0; ///< d log max|u| / d d, negative for decay
    double theoretical_rate = 0.0;
    std::pair<double, double> fit_window{0.0, 0.0};
    double r_correction = 0.0;
    bool correction_vacuous = false; ///< r exceeds the main rate
    std::vector<Shell> shells;
    int shells_used = 0;

    double fitted_rate() const { return -fitted_slope; }
    double ratio() const { return theoretical_rate > 0 ? fitted_rate() / theoretical_rate : 0.0; }
};

/// Least-squares slope of log(max over shell |u|) against the shell distance, shells of width h.
/// A window with d_max <= 0 is chosen automatically.
DecayReport fit_decay(const CVector& u, const Domain& dom, const Grid& grid, std::pair<double, double> window,
                      double theoretical_rate = 0.0);

/// (1 - theta0)^{1/2} sqrt(q).
double main_rate(double q, double theta0);
/// (q tau)^{3/8 + x/4}.
double helical_rate_correction(double qtau, double x);
/// q^{1/2 - 1/(8(1+2y))} R^{-1/(4(1+2y))}.
double large_domain_rate_correction(double q, double R, double y);

/// Fraction of h^d sum |u|^2 carried by nodes with d < width.
double boundary_mass_fraction(const CVector& u, const Grid& grid, double width);

} // namespace magspec::agmon
