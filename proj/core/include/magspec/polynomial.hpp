#pragma once

#include "magspec/types.hpp"

#include <array>
#include <vector>

namespace magspec {

/// Real polynomial in (x1, x2, x3) of total degree at most 3.
class Polynomial3 {
public:
    static constexpr int max_degree = 3;
    static constexpr int count = 20;
    struct Exponent {
        int a, b, c;
    };

    Polynomial3() { coef_.fill(0.0); }

    static const std::array<Exponent, count>& exponents();
    static int index_of(int a, int b, int c); ///< throws if degree > 3

    static Polynomial3 monomial(int a, int b, int c, double coefficient = 1.0);
    static Polynomial3 constant(double c) { return monomial(0, 0, 0, c); }

    double coefficient(int a, int b, int c) const { return coef_[index_of(a, b, c)]; }
    void set(int a, int b, int c, double v) { coef_[index_of(a, b, c)] = v; }
    void add(int a, int b, int c, double v) { coef_[index_of(a, b, c)] += v; }
    const std::array<double, count>& coefficients() const { return coef_; }

    double operator()(const Vec3& x) const;
    Polynomial3 derivative(int axis) const;
    Vec3 gradient(const Vec3& x) const;
    int degree() const;

    Polynomial3 operator+(const Polynomial3& o) const;
    Polynomial3 operator*(double s) const;

    /// Pseudo-random polynomial with coefficients uniform in [-scale, scale]
    /// up to the given degree.
    static Polynomial3 random(unsigned long long seed, int degree, double scale);

private:
    std::array<double, count> coef_;
};

} // namespace magspec
