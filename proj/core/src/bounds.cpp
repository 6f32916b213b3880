#include "magspec/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace magspec::bounds {

namespace {
double to_double(Rational r) { return boost::rational_cast<double>(r); }

Rational to_rational(double x) {
    // exact for dyadic and small-denominator inputs used by configs
    for (long long den : {1LL, 2LL, 3LL, 4LL, 5LL, 6LL, 8LL, 10LL, 12LL, 16LL, 20LL, 24LL, 32LL, 48LL, 64LL, 100LL,
                          1000LL, 1000000LL}) {
        const double num = x * static_cast<double>(den);
        if (std::abs(num - std::round(num)) < 1e-12 * std::max(1.0, std::abs(num)))
            return Rational(static_cast<long long>(std::llround(num)), den);
    }
    throw InvalidArgument("exponent is not representable as a small rational");
}
} // namespace

void BoundParams::validate() const {
    if (!(epsilon > 0 && epsilon < 0.5)) throw InvalidArgument("epsilon must lie in (0, 1/2)");
    if (!(delta > 0 && delta < 0.5)) throw InvalidArgument("delta must lie in (0, 1/2)");
    if (!(C > 0)) throw InvalidArgument("C must be positive");
}

double lower_bound_rhs(double q, const BoundParams& p, const SeminormReport& s, double theta0) {
    if (!(q > 0)) throw InvalidArgument("q must be positive");
    p.validate();
    const double e = p.epsilon;
    return theta0 * q - p.C * (std::pow(q, 1 - 2 * e) + (1 + s.sup_gradB) * std::pow(q, 0.5 + 2 * e));
}

double upper_bound_rhs(double q, const BoundParams& p, const SeminormReport& s, double theta0) {
    if (!(q > 0)) throw InvalidArgument("q must be positive");
    p.validate();
    const double d = p.delta;
    const double c1sq = s.c1_norm_sq, c2sq = s.c2_norm_sq;
    const double c1 = std::sqrt(c1sq), c2 = std::sqrt(c2sq);
    return theta0 * q + p.C * (std::pow(q, 2 * d) + c1sq * std::pow(q, 2 - 4 * d) + c1 * std::pow(q, 1 - d) +
                               c2 * std::pow(q, 1.5 - 3 * d) + c2sq * std::pow(q, 2 - 6 * d));
}

std::vector<Rational> lower_remainder_exponents(Rational epsilon, Rational x) {
    // q^{1-2eps}, q^{1/2+2eps}, and |grad B| q^{1/2+2eps} with |grad B| ~ q^x
    return {1 - 2 * epsilon, Rational(1, 2) + 2 * epsilon, Rational(1, 2) + 2 * epsilon + x};
}

std::vector<Rational> upper_remainder_exponents(Rational delta, Rational x) {
    // |B|_{C1} ~ q^x, |B|_{C2} ~ q^{2x}
    return {2 * delta, 2 - 4 * delta + 2 * x, 1 - delta + x, Rational(3, 2) - 3 * delta + 2 * x,
            2 - 6 * delta + 4 * x};
}

Rational leading_exponent(const std::vector<Rational>& exps) {
    if (exps.empty()) throw InvalidArgument("no exponents");
    return *std::max_element(exps.begin(), exps.end());
}

bool lower_bound_informative(double epsilon) {
    return to_double(leading_exponent(lower_remainder_exponents(to_rational(epsilon)))) < 1.0;
}

bool upper_bound_informative(double delta) {
    return to_double(leading_exponent(upper_remainder_exponents(to_rational(delta)))) < 1.0;
}

ExactExponents choose_exponents(Rational x) {
    if (x < 0 || x >= Rational(1, 2)) throw InvalidArgument("x must lie in [0, 1/2)");
    const Rational two_eps = Rational(1, 4) - x / 2;
    return {two_eps / 2, (1 + x) / 3};
}

Exponents choose_exponents(double x) {
    if (!(x >= 0 && x < 0.5)) throw InvalidArgument("x must lie in [0, 1/2)");
    return {(0.25 - x / 2) / 2, (1 + x) / 3};
}

RatePair helical_rates(Rational x) {
    const auto e = choose_exponents(x);
    return {1 - leading_exponent(lower_remainder_exponents(e.epsilon, x)),
            1 - leading_exponent(upper_remainder_exponents(e.delta, x))};
}

RatePair large_domain_rates(Rational y) {
    if (y < 0) throw InvalidArgument("y must be nonnegative");
    return helical_rates(y / (1 + 2 * y));
}

RatioBounds helical_ratio_bounds(double qtau, double tau, double x, double c0, double C, double theta0) {
    if (!(qtau > 0 && tau > 0)) throw InvalidArgument("q tau and tau must be positive");
    if (!(x >= 0 && x < 0.5)) throw InvalidArgument("x must lie in [0, 1/2)");
    if (tau > c0 * std::pow(qtau, x)) {
        std::ostringstream os;
        os << "helical regime violated: tau=" << tau << " > c0 (q tau)^x=" << c0 * std::pow(qtau, x);
        throw RegimeError(os.str());
    }
    return {theta0 - C * std::pow(qtau, -(0.25 - x / 2)), theta0 + C * std::pow(qtau, -(1.0 / 3 - 2 * x / 3))};
}

RatioBounds large_domain_ratio_bounds(double q, double R, double y, double c0, double C, double theta0,
                                      UpperSign sign) {
    if (!(q > 0 && R > 0)) throw InvalidArgument("q and R must be positive");
    if (!(y >= 0)) throw InvalidArgument("y must be nonnegative");
    if (R > c0 * std::pow(q, y)) {
        std::ostringstream os;
        os << "large-domain regime violated: R=" << R << " > c0 q^y=" << c0 * std::pow(q, y);
        throw RegimeError(os.str());
    }
    const double s = q * R * R;
    const double lo = theta0 - C * std::pow(s, -1.0 / (4 * (1 + 2 * y)));
    const double corr = C * std::pow(s, -1.0 / (3 * (1 + 2 * y)));
    return {lo, sign == UpperSign::Plus ? theta0 + corr : theta0 - corr};
}

double dirichlet_ratio_lower_bound(double q, double epsilon, double sup_gradB, double C) {
    if (!(q > 0)) throw InvalidArgument("q must be positive");
    if (!(epsilon > 0 && epsilon < 0.5)) throw InvalidArgument("epsilon must lie in (0, 1/2)");
    return 1.0 - C * (std::pow(q, -2 * epsilon) + sup_gradB * std::pow(q, -(0.5 - 2 * epsilon)));
}

bool BoundReport::consistent(double slack) const {
    if (lower_rhs > upper_rhs) return false;
    if (computed_mu) {
        if (*computed_mu < lower_rhs - slack) return false;
        if (quasimode_rayleigh && *computed_mu > *quasimode_rayleigh + residual.value_or(0.0) + slack) return false;
    }
    return true;
}

} // namespace magspec::bounds
