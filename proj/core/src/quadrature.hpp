#pragma once

#include <array>
#include <cmath>
#include <functional>

namespace magspec::detail {

// Gauss-Legendre rules on [0, 1].
struct GaussRule {
    const double* x;
    const double* w;
    int n;
};

inline GaussRule gauss_rule(int n) {
    static const double x2[] = {0.21132486540518711775, 0.78867513459481288225};
    static const double w2[] = {0.5, 0.5};
    static const double x3[] = {0.11270166537925831148, 0.5, 0.88729833462074168852};
    static const double w3[] = {0.27777777777777777778, 0.44444444444444444444, 0.27777777777777777778};
    static const double x5[] = {0.04691007703066800360, 0.23076534494715845448, 0.5, 0.76923465505284154552,
                                0.95308992296933199640};
    static const double w5[] = {0.11846344252809454376, 0.23931433524968323402, 0.28444444444444444444,
                                0.23931433524968323402, 0.11846344252809454376};
    static const double x7[] = {0.02544604382862073773, 0.12923440720030278007, 0.29707742431130141655, 0.5,
                                0.70292257568869858345, 0.87076559279969721993, 0.97455395617137926227};
    static const double w7[] = {0.06474248308443484664, 0.13985269574463833395, 0.19091502525255947247,
                                0.20897959183673469388, 0.19091502525255947247, 0.13985269574463833395,
                                0.06474248308443484664};
    switch (n) {
    case 2: return {x2, w2, 2};
    case 3: return {x3, w3, 3};
    case 5: return {x5, w5, 5};
    default: return {x7, w7, 7};
    }
}

inline double integrate_fixed(const std::function<double(double)>& f, double a, double b, int n) {
    const GaussRule r = gauss_rule(n);
    double s = 0.0;
    for (int i = 0; i < r.n; ++i) s += r.w[i] * f(a + (b - a) * r.x[i]);
    return s * (b - a);
}

inline double integrate_adaptive_impl(const std::function<double(double)>& f, double a, double b, double whole,
                                      double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = integrate_fixed(f, a, m, 7);
    const double right = integrate_fixed(f, m, b, 7);
    if (depth <= 0 || std::abs(left + right - whole) <= tol) return left + right;
    return integrate_adaptive_impl(f, a, m, left, 0.5 * tol, depth - 1) +
           integrate_adaptive_impl(f, m, b, right, 0.5 * tol, depth - 1);
}

/// Adaptive 7-point Gauss-Legendre with interval bisection.
inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol) {
    const double whole = integrate_fixed(f, a, b, 7);
    return integrate_adaptive_impl(f, a, b, whole, tol, 30);
}

inline double sinc(double x) {
    if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

} // namespace magspec::detail
