#pragma once

#include "magspec/types.hpp"

#include <utility>
#include <vector>

namespace magspec::degennes {

/// Uniform grid on [0, T] with node count N = T/h. Node N carries the
/// Dirichlet truncation, node 0 the Neumann reflection.
struct HalfLineDiscretization {
    double T = 20.0;
    double h = 1e-3;

    int nodes() const; ///< N, throws if T/h is not an integer
    void validate() const;
    bool certified() const { return T >= 10.0 && h <= 1e-2; }
    HalfLineDiscretization refined() const { return {T, h / 2}; }
};

struct DeGennesPoint {
    double xi = 0.0;
    double mu = 0.0;
    double h = 0.0;
    /// Values at t_i = i*h, i = 0..N (last entry is the Dirichlet zero).
    std::vector<double> ground_state;

    /// Linear interpolation of the ground state, zero beyond T.
    double value_at(double t) const;
    double T() const { return h * static_cast<double>(ground_state.size() - 1); }
};

struct DeGennesMinimum {
    double xi0 = 0.0;
    double theta0 = 0.0;
    DeGennesPoint u0;
    std::pair<double, double> bracket{0.0, 0.0};
    HalfLineDiscretization disc;
};

/// Lowest eigenpair of -u'' + (t + xi)^2 u, u'(0) = 0, u(T) = 0.
DeGennesPoint mu_of_xi(double xi, const HalfLineDiscretization& disc);

/// Two lowest eigenvalues of the symmetrized tridiagonal matrix (Sturm bisection).
std::pair<double, double> lowest_two_eigenvalues(double xi, const HalfLineDiscretization& disc);

/// Golden-section minimization of xi -> mu(xi), starting on [-2, 0].
DeGennesMinimum minimize_mu(const HalfLineDiscretization& disc, double tol_xi);

/// L2 mass of the ground state on [t_from, T] (trapezoid, interpolated start).
double ground_state_tail(const DeGennesPoint& point, double t_from);

struct CurveSample {
    double xi;
    double mu;
};

/// Sampled curve on n equispaced points of [lo, hi]; order-independent parallel evaluation.
std::vector<CurveSample> sample_curve(double lo, double hi, int n, const HalfLineDiscretization& disc,
                                      int threads = 1);

struct ExtrapolatedMinimum {
    double xi0;
    double theta0;
    DeGennesMinimum coarse;
    DeGennesMinimum fine;
};

/// Second-order Richardson extrapolation of (xi0, theta0) over h and h/2.
ExtrapolatedMinimum extrapolate_minimum(const HalfLineDiscretization& disc, double tol_xi);

} // namespace magspec::degennes
