#include "magspec/agmon.hpp"

#include "magspec/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace magspec::agmon {

double ramp(double t) {
    if (t <= 0) return 0.0;
    if (t >= 1) return 1.0;
    return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

AgmonWeight make_weight(const Grid& grid, double gamma, double alpha) {
    if (!(gamma > 0)) throw InvalidArgument("gamma must be positive");
    if (alpha < 0) throw InvalidArgument("alpha must be nonnegative");
    AgmonWeight w;
    w.gamma = gamma;
    w.alpha = alpha;
    w.eta.resize(grid.size());
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const double d = grid.distances()[n];
        w.eta[n] = d >= gamma ? 1.0 : ramp((d - 0.5 * gamma) / (0.5 * gamma));
    }
    w.gradient_constant = 2.0 * 15.0 / 8.0; // max of the quintic slope over the half-width
    return w;
}

double admissible_alpha(double mu, double mu0, double eps) {
    if (!(eps > 0)) throw InvalidArgument("eps must be positive");
    if (!(mu0 > mu)) throw InvalidArgument("no decay certified: mu0 <= mu");
    return std::sqrt((mu0 - mu) / (1 + eps));
}

double weighted_h1_norm(const CVector& u, const AgmonWeight& w, const Domain& dom, const Grid& grid) {
    (void)dom;
    const std::size_t n = grid.size();
    if (static_cast<std::size_t>(u.size()) != n || w.eta.size() != n) throw InvalidArgument("size mismatch");
    // log of the weighted modulus; -inf where it vanishes
    std::vector<double> lf(n);
    double lmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::abs(u[i]);
        lf[i] = (w.eta[i] > 0 && a > 0) ? std::log(w.eta[i]) + w.alpha * grid.distances()[i] + std::log(a)
                                        : -std::numeric_limits<double>::infinity();
        lmax = std::max(lmax, lf[i]);
    }
    if (!std::isfinite(lmax)) return 0.0;
    const bool log_space = w.alpha * (grid.dimension() > 0 ? dom.inradius() : 0.0) > 300.0;
    const double shift = log_space ? lmax : 0.0;
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = std::isfinite(lf[i]) ? std::exp(lf[i] - shift) : 0.0;
    double l2 = 0.0;
    for (double v : f) l2 += v * v;
    double grad = 0.0;
    for (const auto& link : grid.links()) {
        const double d = f[link.b] - f[link.a];
        grad += d * d;
    }
    const double h = grid.h();
    const double hd = grid.cell_volume();
    const double sq = l2 * hd + grad * hd / (h * h);
    return log_space ? std::exp(shift) * std::sqrt(sq) : std::sqrt(sq);
}

double agmon_rhs(double mu, double mu0, double eps, double gamma, double alpha, double C) {
    const double den = mu0 - mu - (1 + eps) * alpha * alpha;
    if (!(den > 0)) throw InvalidArgument("agmon bound denominator is not positive");
    if (!(eps > 0 && gamma > 0)) throw InvalidArgument("eps and gamma must be positive");
    return C / std::sqrt(eps * gamma) * std::sqrt((mu0 + 1) / den) * std::exp(alpha * gamma);
}

DecayReport fit_decay(const CVector& u, const Domain& dom, const Grid& grid, std::pair<double, double> window,
                      double theoretical_rate) {
    const double h = grid.h();
    const double inr = dom.inradius();
    // shells of width h by distance to the boundary
    const int ns = static_cast<int>(std::ceil(inr / h)) + 1;
    std::vector<double> mx(ns, 0.0);
    std::vector<char> seen(ns, 0);
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const int k = static_cast<int>(grid.distances()[n] / h);
        if (k < 0 || k >= ns) continue;
        mx[k] = std::max(mx[k], std::abs(u[n]));
        seen[k] = 1;
    }
    DecayReport rep;
    rep.theoretical_rate = theoretical_rate;
    for (int k = 0; k < ns; ++k)
        if (seen[k]) rep.shells.push_back({(k + 0.5) * h, mx[k]});

    double dmin = window.first, dmax = window.second;
    if (dmax <= 0) {
        dmin = 2 * h;
        dmax = 0.8 * inr;
    }
    if (dmin < 2 * h) throw InvalidArgument("fit window must start at least 2h from the boundary");
    if (dmax >= inr) throw InvalidArgument("fit window must end below the inradius");
    // stay above the floating-point floor
    double peak = 0.0;
    for (const auto& s : rep.shells) peak = std::max(peak, s.max_abs_u);
    const double floor = peak * 1e-13;
    double dcut = dmax;
    for (const auto& s : rep.shells)
        if (s.d >= dmin && s.d <= dmax && s.max_abs_u <= floor) {
            dcut = std::min(dcut, s.d - h);
        }
    if (dcut < dmax) {
        warn("decay fit window shrunk to stay above the floating-point floor");
        dmax = dcut;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& s : rep.shells) {
        if (s.d < dmin || s.d > dmax || !(s.max_abs_u > 0)) continue;
        const double y = std::log(s.max_abs_u);
        sx += s.d;
        sy += y;
        sxx += s.d * s.d;
        sxy += s.d * y;
        ++m;
    }
    if (m < 20) throw DiscretizationError("decay fit needs at least 20 shells in the window");
    rep.fitted_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    rep.fit_window = {dmin, dmax};
    rep.shells_used = m;
    return rep;
}

double main_rate(double q, double theta0) { return std::sqrt((1 - theta0) * q); }

double helical_rate_correction(double qtau, double x) { return std::pow(qtau, 3.0 / 8 + x / 4); }

double large_domain_rate_correction(double q, double R, double y) {
    return std::pow(q, 0.5 - 1.0 / (8 * (1 + 2 * y))) * std::pow(R, -1.0 / (4 * (1 + 2 * y)));
}

double boundary_mass_fraction(const CVector& u, const Grid& grid, double width) {
    double in = 0.0, all = 0.0;
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const double m = std::norm(u[n]);
        all += m;
        if (grid.distances()[n] < width) in += m;
    }
    return all > 0 ? in / all : 0.0;
}

} // namespace magspec::agmon
