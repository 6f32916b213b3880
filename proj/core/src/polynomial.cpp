#include "magspec/polynomial.hpp"

#include <random>

namespace magspec {

const std::array<Polynomial3::Exponent, Polynomial3::count>& Polynomial3::exponents() {
    static const std::array<Exponent, count> table = [] {
        std::array<Exponent, count> t{};
        int k = 0;
        for (int deg = 0; deg <= max_degree; ++deg)
            for (int a = deg; a >= 0; --a)
                for (int b = deg - a; b >= 0; --b) t[k++] = {a, b, deg - a - b};
        return t;
    }();
    return table;
}

int Polynomial3::index_of(int a, int b, int c) {
    if (a < 0 || b < 0 || c < 0 || a + b + c > max_degree)
        throw InvalidArgument("monomial exponent outside degree 3");
    const auto& t = exponents();
    for (int k = 0; k < count; ++k)
        if (t[k].a == a && t[k].b == b && t[k].c == c) return k;
    throw InvalidArgument("monomial not found");
}

Polynomial3 Polynomial3::monomial(int a, int b, int c, double coefficient) {
    Polynomial3 p;
    p.set(a, b, c, coefficient);
    return p;
}

double Polynomial3::operator()(const Vec3& x) const {
    double pw[3][4];
    for (int k = 0; k < 3; ++k) {
        pw[k][0] = 1.0;
        for (int e = 1; e <= 3; ++e) pw[k][e] = pw[k][e - 1] * x[k];
    }
    const auto& t = exponents();
    double s = 0.0;
    for (int k = 0; k < count; ++k)
        if (coef_[k] != 0.0) s += coef_[k] * pw[0][t[k].a] * pw[1][t[k].b] * pw[2][t[k].c];
    return s;
}

Polynomial3 Polynomial3::derivative(int axis) const {
    Polynomial3 d;
    const auto& t = exponents();
    for (int k = 0; k < count; ++k) {
        if (coef_[k] == 0.0) continue;
        int e[3] = {t[k].a, t[k].b, t[k].c};
        if (e[axis] == 0) continue;
        const double f = coef_[k] * e[axis];
        --e[axis];
        d.add(e[0], e[1], e[2], f);
    }
    return d;
}

Vec3 Polynomial3::gradient(const Vec3& x) const {
    return {derivative(0)(x), derivative(1)(x), derivative(2)(x)};
}

int Polynomial3::degree() const {
    int d = -1;
    const auto& t = exponents();
    for (int k = 0; k < count; ++k)
        if (coef_[k] != 0.0) d = std::max(d, t[k].a + t[k].b + t[k].c);
    return d;
}

Polynomial3 Polynomial3::operator+(const Polynomial3& o) const {
    Polynomial3 r;
    for (int k = 0; k < count; ++k) r.coef_[k] = coef_[k] + o.coef_[k];
    return r;
}

Polynomial3 Polynomial3::operator*(double s) const {
    Polynomial3 r;
    for (int k = 0; k < count; ++k) r.coef_[k] = coef_[k] * s;
    return r;
}

Polynomial3 Polynomial3::random(unsigned long long seed, int degree, double scale) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    Polynomial3 p;
    const auto& t = exponents();
    for (int k = 0; k < count; ++k)
        if (t[k].a + t[k].b + t[k].c <= degree) p.coef_[k] = u(rng);
    return p;
}

} // namespace magspec
