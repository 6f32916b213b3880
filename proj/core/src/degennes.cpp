#include "magspec/degennes.hpp"

#include "magspec/diagnostics.hpp"
#include "magspec/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace magspec::degennes {

namespace {

// Symmetrized tridiagonal matrix on unknowns 0..N-1. Row 0 is scaled by the
// half trapezoid weight so the ghost-node reflection stays symmetric.
struct Tridiagonal {
    std::vector<double> d;
    std::vector<double> e; // e[i] couples i and i+1
};

Tridiagonal build(double xi, const HalfLineDiscretization& disc) {
    const int n = disc.nodes();
    const double h = disc.h;
    const double ih2 = 1.0 / (h * h);
    Tridiagonal m;
    m.d.resize(n);
    m.e.assign(n - 1, -ih2);
    for (int i = 0; i < n; ++i) {
        const double s = i * h + xi;
        m.d[i] = 2.0 * ih2 + s * s;
    }
    m.e[0] = -std::sqrt(2.0) * ih2;
    return m;
}

// Number of eigenvalues strictly below x.
int sturm_count(const Tridiagonal& m, double x, double pivmin) {
    int count = 0;
    double q = m.d[0] - x;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0) ++count;
    for (std::size_t i = 1; i < m.d.size(); ++i) {
        q = (m.d[i] - x) - m.e[i - 1] * m.e[i - 1] / q;
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0) ++count;
    }
    return count;
}

// k-th eigenvalue (1-based) as a bracket [lo, hi] with count(lo) < k <= count(hi).
std::pair<double, double> bisect(const Tridiagonal& m, int k) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double emax = 0.0;
    for (std::size_t i = 0; i < m.d.size(); ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(m.e[i - 1]);
        if (i + 1 < m.d.size()) r += std::abs(m.e[i]);
        lo = std::min(lo, m.d[i] - r);
        hi = std::max(hi, m.d[i] + r);
        if (i + 1 < m.d.size()) emax = std::max(emax, std::abs(m.e[i]));
    }
    // the potential is nonnegative and the difference part is positive semidefinite
    lo = std::max(lo, 0.0) - 1e-300;
    const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, emax * emax);
    const double eps = std::numeric_limits<double>::epsilon();
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (hi - lo <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi))) break;
        if (sturm_count(m, mid, pivmin) >= k)
            hi = mid;
        else
            lo = mid;
    }
    return {lo, hi};
}

// Solves (m - sigma I) x = b for positive definite m - sigma I.
void solve_shifted(const Tridiagonal& m, double sigma, std::vector<double>& x) {
    const std::size_t n = m.d.size();
    std::vector<double> c(n), piv(n);
    piv[0] = m.d[0] - sigma;
    for (std::size_t i = 1; i < n; ++i) {
        c[i - 1] = m.e[i - 1] / piv[i - 1];
        piv[i] = (m.d[i] - sigma) - c[i - 1] * m.e[i - 1];
    }
    for (std::size_t i = 1; i < n; ++i) x[i] -= c[i - 1] * x[i - 1];
    x[n - 1] /= piv[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = x[i] / piv[i] - c[i] * x[i + 1];
}

// Energy form in difference form; avoids the O(eps/h^2) cancellation of x^T M x.
double rayleigh(const std::vector<double>& u, double xi, double h) {
    const std::size_t n = u.size() - 1; // u[n] = 0
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double du = u[i + 1] - u[i];
        num += du * du / (h * h);
        const double w = (i == 0) ? 0.5 : 1.0;
        const double s = i * h + xi;
        num += w * s * s * u[i] * u[i];
        den += w * u[i] * u[i];
    }
    return num / den;
}

} // namespace

int HalfLineDiscretization::nodes() const {
    if (!(T > 0.0) || !(h > 0.0)) throw InvalidArgument("half-line discretization needs T > 0 and h > 0");
    const double r = T / h;
    const double n = std::round(r);
    if (std::abs(n - r) > 1e-9 * r) {
        std::ostringstream os;
        os << "T/h must be an integer (T=" << T << ", h=" << h << ")";
        throw InvalidArgument(os.str());
    }
    if (n < 8) throw DiscretizationError("half-line grid needs at least 8 nodes");
    return static_cast<int>(n);
}

void HalfLineDiscretization::validate() const { (void)nodes(); }

double DeGennesPoint::value_at(double t) const {
    if (ground_state.empty()) return 0.0;
    if (t <= 0.0) return ground_state.front();
    const double s = t / h;
    const auto i = static_cast<std::size_t>(s);
    if (i + 1 >= ground_state.size()) return 0.0;
    const double f = s - static_cast<double>(i);
    return (1.0 - f) * ground_state[i] + f * ground_state[i + 1];
}

std::pair<double, double> lowest_two_eigenvalues(double xi, const HalfLineDiscretization& disc) {
    const Tridiagonal m = build(xi, disc);
    const auto b1 = bisect(m, 1);
    const auto b2 = bisect(m, 2);
    return {0.5 * (b1.first + b1.second), 0.5 * (b2.first + b2.second)};
}

DeGennesPoint mu_of_xi(double xi, const HalfLineDiscretization& disc) {
    const int n = disc.nodes();
    if (std::abs(xi) > disc.T / 2)
        throw InvalidArgument("|xi| must not exceed T/2 so the well sits inside the truncation");

    const Tridiagonal m = build(xi, disc);
    const auto b1 = bisect(m, 1);
    const auto b2 = bisect(m, 2);
    const double l1 = 0.5 * (b1.first + b1.second);
    const double l2 = 0.5 * (b2.first + b2.second);
    if (l2 - l1 < 10.0 * disc.h * disc.h)
        throw DiscretizationError("lowest two half-line eigenvalues are not separated by 10 h^2");

    // Shift strictly below the spectrum: the shifted matrix is a positive definite
    // M-matrix, so every solve maps positive vectors to positive vectors.
    const double sigma = b1.first - 1e-9 * (1.0 + std::abs(l1));
    std::vector<double> v(n, 1.0);
    for (int it = 0; it < 3; ++it) {
        solve_shifted(m, sigma, v);
        double nrm = 0.0;
        for (double x : v) nrm += x * x;
        nrm = std::sqrt(nrm);
        for (double& x : v) x /= nrm;
    }

    DeGennesPoint p;
    p.xi = xi;
    p.h = disc.h;
    p.ground_state.assign(n + 1, 0.0);
    p.ground_state[0] = std::sqrt(2.0) * v[0];
    for (int i = 1; i < n; ++i) p.ground_state[i] = v[i];

    double mass = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = (i == 0) ? 0.5 : 1.0;
        mass += w * disc.h * p.ground_state[i] * p.ground_state[i];
    }
    const double scale = 1.0 / std::sqrt(mass);
    for (double& x : p.ground_state) x *= scale;

    p.mu = rayleigh(p.ground_state, xi, disc.h);
    return p;
}

DeGennesMinimum minimize_mu(const HalfLineDiscretization& disc, double tol_xi) {
    if (!(tol_xi > 0.0)) throw InvalidArgument("tol_xi must be positive");
    disc.validate();
    auto mu = [&](double x) { return mu_of_xi(x, disc).mu; };

    auto unimodal = [&](double a, double b) {
        constexpr int n = 17;
        std::vector<double> f(n);
        for (int i = 0; i < n; ++i) f[i] = mu(a + (b - a) * i / (n - 1));
        const auto k = std::min_element(f.begin(), f.end()) - f.begin();
        if (k == 0 || k == n - 1) return false;
        for (int i = 1; i <= k; ++i)
            if (!(f[i] < f[i - 1])) return false;
        for (int i = static_cast<int>(k) + 1; i < n; ++i)
            if (!(f[i] > f[i - 1])) return false;
        return true;
    };

    double a = -2.0;
    double b = 0.0;
    if (!unimodal(a, b)) {
        warn("de Gennes curve not unimodal on [-2, 0]; widening to [-4, 1]");
        a = -4.0;
        b = 1.0;
        if (!unimodal(a, b)) throw BracketError("mu(xi) is not unimodal on the sampled bracket");
    }

    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = mu(c);
    double fd = mu(d);
    while (b - a > tol_xi) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = mu(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = mu(d);
        }
    }

    DeGennesMinimum out;
    out.disc = disc;
    out.xi0 = (fc < fd) ? c : d;
    out.u0 = mu_of_xi(out.xi0, disc);
    out.theta0 = out.u0.mu;
    out.bracket = {a, b};
    // below tol ~ 1e-7 the curve is flat to rounding, so ties count as certified
    const double noise = 64 * std::numeric_limits<double>::epsilon() * out.theta0;
    if (!(mu(a) > out.theta0 - noise) || !(mu(b) > out.theta0 - noise))
        throw BracketError("bracket endpoints do not certify the minimizer");
    return out;
}

double ground_state_tail(const DeGennesPoint& point, double t_from) {
    const auto& u = point.ground_state;
    const double h = point.h;
    const double T = point.T();
    if (t_from >= T) return 0.0;
    t_from = std::max(t_from, 0.0);
    const auto i0 = static_cast<std::size_t>(t_from / h);
    double mass = 0.0;
    // partial first cell, trapezoid on the interpolated square
    {
        const double t1 = (i0 + 1) * h;
        const double a = point.value_at(t_from);
        const double b = u[i0 + 1];
        mass += 0.5 * (t1 - t_from) * (a * a + b * b);
    }
    for (std::size_t i = i0 + 1; i + 1 < u.size(); ++i) mass += 0.5 * h * (u[i] * u[i] + u[i + 1] * u[i + 1]);
    return mass;
}

std::vector<CurveSample> sample_curve(double lo, double hi, int n, const HalfLineDiscretization& disc,
                                      int threads) {
    if (n < 2) throw InvalidArgument("curve needs at least two samples");
    std::vector<CurveSample> out(n);
    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
        out[i] = {x, mu_of_xi(x, disc).mu};
    });
    return out;
}

ExtrapolatedMinimum extrapolate_minimum(const HalfLineDiscretization& disc, double tol_xi) {
    ExtrapolatedMinimum r;
    r.coarse = minimize_mu(disc, tol_xi);
    r.fine = minimize_mu(disc.refined(), tol_xi);
    r.xi0 = (4.0 * r.fine.xi0 - r.coarse.xi0) / 3.0;
    r.theta0 = (4.0 * r.fine.theta0 - r.coarse.theta0) / 3.0;
    return r;
}

} // namespace magspec::degennes
