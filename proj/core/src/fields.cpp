#include "magspec/fields.hpp"

#include "quadrature.hpp"

#include <cmath>

namespace magspec {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::array<Polynomial3, 3> polynomial_curl(const std::array<Polynomial3, 3>& P) {
    return {P[2].derivative(1) + P[1].derivative(2) * -1.0, P[0].derivative(2) + P[2].derivative(0) * -1.0,
            P[1].derivative(0) + P[0].derivative(1) * -1.0};
}

Mat3 fd_jacobian(const std::function<Vec3(const Vec3&)>& f, const Vec3& x, double step) {
    Mat3 J;
    for (int j = 0; j < 3; ++j) {
        Vec3 e = Vec3::Zero();
        e[j] = step;
        J.col(j) = (f(x + e) - f(x - e)) / (2 * step);
    }
    return J;
}

struct HelicalFrame {
    Vec3 n, m, mp, a;
};

HelicalFrame helical_frame(const HelicalField& h, const Vec3& x) {
    const Mat3& Q = h.Q.matrix();
    const Vec3 z = Q.transpose() * (x - h.origin);
    const double c = std::cos(h.tau * z[2]);
    const double s = std::sin(h.tau * z[2]);
    return {Q * Vec3(c, s, 0), Q * Vec3(-s, c, 0), Q * Vec3(-c, -s, 0), Q.col(2)};
}

} // namespace

FieldSpec::FieldSpec(Variant v) : v_(std::move(v)) {
    std::visit(overloaded{
                   [](const HelicalField& h) {
                       if (h.tau < 0) throw InvalidArgument("helical tau must be nonnegative");
                       if (h.normalized && !(h.tau > 0)) throw InvalidArgument("normalized helical needs tau > 0");
                   },
                   [](const GaugeShiftedField& g) {
                       if (!g.base) throw InvalidArgument("gauge shift needs a base field");
                   },
                   [](const PullbackField& p) {
                       if (!p.base || !p.chart.map || !p.chart.jacobian)
                           throw InvalidArgument("pullback needs a base field and a chart");
                   },
                   [](const DilatedField& d) {
                       if (!d.base) throw InvalidArgument("dilation needs a base field");
                       if (!(d.R > 0)) throw InvalidArgument("dilation factor must be positive");
                   },
                   [](const auto&) {},
               },
               v_);
}

std::string FieldSpec::kind() const {
    return std::visit(overloaded{
                          [](const LinearField&) { return std::string("linear"); },
                          [](const HelicalField&) { return std::string("helical"); },
                          [](const GaugeShiftedField&) { return std::string("gauge_shifted"); },
                          [](const PolynomialField&) { return std::string("polynomial"); },
                          [](const PullbackField&) { return std::string("pullback"); },
                          [](const DilatedField&) { return std::string("dilated"); },
                      },
                      v_);
}

Vec3 FieldSpec::potential(const Vec3& x) const {
    return std::visit(overloaded{
                          [&](const LinearField& f) -> Vec3 { return 0.5 * f.B0.cross(x); },
                          [&](const HelicalField& f) -> Vec3 { return f.scale() * helical_frame(f, x).n; },
                          [&](const GaugeShiftedField& f) -> Vec3 {
                              return f.base->potential(x) + f.phi.gradient(x);
                          },
                          [&](const PolynomialField& f) -> Vec3 {
                              return {f.components[0](x), f.components[1](x), f.components[2](x)};
                          },
                          [&](const PullbackField& f) -> Vec3 {
                              return f.chart.jacobian(x).transpose() * f.base->potential(f.chart.map(x));
                          },
                          [&](const DilatedField& f) -> Vec3 {
                              return f.base->potential(f.x0 + f.R * (x - f.x0)) / f.R;
                          },
                      },
                      v_);
}

Vec3 FieldSpec::field(const Vec3& x) const {
    return std::visit(overloaded{
                          [&](const LinearField& f) -> Vec3 { return f.B0; },
                          [&](const HelicalField& f) -> Vec3 {
                              return -f.scale() * f.tau * helical_frame(f, x).n;
                          },
                          [&](const GaugeShiftedField& f) -> Vec3 { return f.base->field(x); },
                          [&](const PolynomialField& f) -> Vec3 {
                              const auto c = polynomial_curl(f.components);
                              return {c[0](x), c[1](x), c[2](x)};
                          },
                          [&](const PullbackField&) -> Vec3 {
                              return curl_fd([this](const Vec3& y) { return potential(y); }, x).value;
                          },
                          [&](const DilatedField& f) -> Vec3 { return f.base->field(f.x0 + f.R * (x - f.x0)); },
                      },
                      v_);
}

Mat3 FieldSpec::field_gradient(const Vec3& x) const {
    return std::visit(
        overloaded{
            [&](const LinearField&) -> Mat3 { return Mat3::Zero(); },
            [&](const HelicalField& f) -> Mat3 {
                const auto fr = helical_frame(f, x);
                return -f.scale() * f.tau * f.tau * fr.m * fr.a.transpose();
            },
            [&](const GaugeShiftedField& f) -> Mat3 { return f.base->field_gradient(x); },
            [&](const PolynomialField& f) -> Mat3 {
                const auto c = polynomial_curl(f.components);
                Mat3 G;
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) G(i, j) = c[i].derivative(j)(x);
                return G;
            },
            [&](const PullbackField&) -> Mat3 {
                return fd_jacobian([this](const Vec3& y) { return field(y); }, x, 1e-4);
            },
            [&](const DilatedField& f) -> Mat3 { return f.R * f.base->field_gradient(f.x0 + f.R * (x - f.x0)); },
        },
        v_);
}

std::array<Mat3, 3> FieldSpec::field_hessian(const Vec3& x) const {
    return std::visit(
        overloaded{
            [&](const LinearField&) -> std::array<Mat3, 3> {
                return {Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
            },
            [&](const HelicalField& f) -> std::array<Mat3, 3> {
                const auto fr = helical_frame(f, x);
                const Mat3 base = -f.scale() * std::pow(f.tau, 3) * fr.mp * fr.a.transpose();
                return {base * fr.a[0], base * fr.a[1], base * fr.a[2]};
            },
            [&](const GaugeShiftedField& f) -> std::array<Mat3, 3> { return f.base->field_hessian(x); },
            [&](const PolynomialField& f) -> std::array<Mat3, 3> {
                const auto c = polynomial_curl(f.components);
                std::array<Mat3, 3> H;
                for (int k = 0; k < 3; ++k)
                    for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j) H[k](i, j) = c[i].derivative(j).derivative(k)(x);
                return H;
            },
            [&](const PullbackField&) -> std::array<Mat3, 3> {
                std::array<Mat3, 3> H;
                const double s = 1e-3;
                for (int k = 0; k < 3; ++k) {
                    Vec3 e = Vec3::Zero();
                    e[k] = s;
                    H[k] = (field_gradient(x + e) - field_gradient(x - e)) / (2 * s);
                }
                return H;
            },
            [&](const DilatedField& f) -> std::array<Mat3, 3> {
                auto H = f.base->field_hessian(f.x0 + f.R * (x - f.x0));
                for (auto& m : H) m *= f.R * f.R;
                return H;
            },
        },
        v_);
}

double FieldSpec::line_integral(const Vec3& a, const Vec3& b) const {
    const Vec3 d = b - a;
    return std::visit(
        overloaded{
            // A is linear in x, so the midpoint value is exact.
            [&](const LinearField& f) -> double { return 0.5 * f.B0.cross(0.5 * (a + b)).dot(d); },
            [&](const HelicalField& f) -> double {
                const Mat3& Q = f.Q.matrix();
                const Vec3 za = Q.transpose() * (a - f.origin);
                const Vec3 dz = Q.transpose() * d;
                // mean of cos / sin of tau(alpha + beta s) over s in [0, 1]
                const double mid = f.tau * (za[2] + 0.5 * dz[2]);
                const double sc = detail::sinc(0.5 * f.tau * dz[2]);
                return f.scale() * (dz[0] * std::cos(mid) * sc + dz[1] * std::sin(mid) * sc);
            },
            [&](const GaugeShiftedField& f) -> double {
                return f.base->line_integral(a, b) + (f.phi(b) - f.phi(a));
            },
            [&](const PolynomialField& f) -> double {
                return detail::integrate_fixed(
                    [&](double s) {
                        const Vec3 x = a + s * d;
                        return f.components[0](x) * d[0] + f.components[1](x) * d[1] + f.components[2](x) * d[2];
                    },
                    0.0, 1.0, 2);
            },
            [&](const PullbackField&) -> double {
                return detail::integrate_fixed([&](double s) { return potential(a + s * d).dot(d); }, 0.0, 1.0, 5);
            },
            [&](const DilatedField& f) -> double {
                const Vec3 A = f.x0 + f.R * (a - f.x0);
                const Vec3 B = f.x0 + f.R * (b - f.x0);
                return f.base->line_integral(A, B) / (f.R * f.R);
            },
        },
        v_);
}

bool FieldSpec::exact_line_integral() const {
    return std::visit(overloaded{
                          [](const GaugeShiftedField& f) { return f.base->exact_line_integral(); },
                          [](const DilatedField& f) { return f.base->exact_line_integral(); },
                          [](const PullbackField&) { return false; },
                          [](const auto&) { return true; },
                      },
                      v_);
}

bool FieldSpec::is_polynomial() const {
    return std::visit(overloaded{
                          [](const LinearField&) { return true; },
                          [](const PolynomialField&) { return true; },
                          [](const GaugeShiftedField& f) { return f.base->is_polynomial(); },
                          [](const DilatedField& f) { return f.base->is_polynomial(); },
                          [](const auto&) { return false; },
                      },
                      v_);
}

bool FieldSpec::unit_intensity() const {
    return std::visit(overloaded{
                          [](const LinearField& f) { return std::abs(f.B0.norm() - 1.0) <= 1e-12; },
                          [](const HelicalField& f) { return f.normalized; },
                          [](const GaugeShiftedField& f) { return f.base->unit_intensity(); },
                          [](const DilatedField& f) { return f.base->unit_intensity(); },
                          [](const auto&) { return false; },
                      },
                      v_);
}

FieldPtr linear_potential(const Vec3& B0) { return std::make_shared<const FieldSpec>(LinearField{B0}); }

FieldPtr helical(double tau, const Rotation& Q) {
    return std::make_shared<const FieldSpec>(HelicalField{tau, Q, false, Vec3::Zero()});
}

FieldPtr normalized_helical(double tau, const Rotation& Q, const Vec3& origin) {
    return std::make_shared<const FieldSpec>(HelicalField{tau, Q, true, origin});
}

FieldPtr gauge_shifted(FieldPtr base, const Polynomial3& phi) {
    return std::make_shared<const FieldSpec>(GaugeShiftedField{std::move(base), phi});
}

FieldPtr polynomial_field(const std::array<Polynomial3, 3>& components) {
    return std::make_shared<const FieldSpec>(PolynomialField{components});
}

FieldPtr pullback(FieldPtr base, const ChartMap& chart) {
    return std::make_shared<const FieldSpec>(PullbackField{std::move(base), chart});
}

FieldPtr dilated(FieldPtr base, double R, const Vec3& x0) {
    return std::make_shared<const FieldSpec>(DilatedField{std::move(base), R, x0});
}

Vec3 curl(const FieldSpec& A, const Vec3& x) { return A.field(x); }

FdCurl curl_fd(const std::function<Vec3(const Vec3&)>& A, const Vec3& x, double step) {
    auto at = [&](double s) {
        const Mat3 J = fd_jacobian(A, x, s); // J(i, j) = d_j A_i
        return Vec3(J(2, 1) - J(1, 2), J(0, 2) - J(2, 0), J(1, 0) - J(0, 1));
    };
    const Vec3 c1 = at(step);
    const Vec3 c2 = at(0.5 * step);
    const Vec3 value = (4.0 * c2 - c1) / 3.0;
    const double change = (c2 - c1).norm() / std::max(1.0, value.norm());
    return {value, change};
}

double poincare_gauge(const FieldSpec& F, const Vec3& x, const Vec3& center) {
    const Vec3 d = x - center;
    auto f = [&](double t) { return F.potential(center + t * d).dot(d); };
    if (F.is_polynomial()) return detail::integrate_fixed(f, 0.0, 1.0, 3);
    return detail::integrate_adaptive(f, 0.0, 1.0, 1e-10);
}

double poincare_gauge(const std::function<Vec3(const Vec3&)>& F, const Vec3& x, const Vec3& center, double tol) {
    const Vec3 d = x - center;
    return detail::integrate_adaptive([&](double t) { return F(center + t * d).dot(d); }, 0.0, 1.0, tol);
}

Vec3 pullback_field(const ChartMap& chart, const Vec3& B, const Vec3& y) {
    const Mat3 J = chart.jacobian(y);
    const double det = J.determinant();
    if (std::abs(det) < 1e-14) throw GeometryError("singular chart Jacobian");
    // comatrix identity for the pulled-back 1-form DPhi^t A(Phi)
    return det * J.inverse() * B;
}

SeminormReport SeminormReport::from_sups(double B, double gradB, double hessB) {
    SeminormReport r;
    r.sup_B = B;
    r.sup_gradB = gradB;
    r.sup_hessB = hessB;
    r.c1_norm_sq = B + gradB * gradB;
    r.c2_norm_sq = r.c1_norm_sq + hessB * hessB;
    return r;
}

SeminormReport seminorms(const FieldSpec& F, const Box& box, int samples) {
    if (samples < 512) throw InvalidArgument("seminorm sampling needs at least 8^3 points");
    const int n = std::max(8, static_cast<int>(std::ceil(std::cbrt(static_cast<double>(samples)) - 1e-9)));
    const Vec3 ext = box.extent();
    double sB = 0, sG = 0, sH = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const Vec3 x = box.lo + Vec3(ext[0] * i, ext[1] * j, ext[2] * k) / (n - 1);
                sB = std::max(sB, F.field(x).norm());
                sG = std::max(sG, F.field_gradient(x).norm());
                const auto H = F.field_hessian(x);
                sH = std::max(sH, std::sqrt(H[0].squaredNorm() + H[1].squaredNorm() + H[2].squaredNorm()));
            }
    auto r = SeminormReport::from_sups(sB, sG, sH);
    r.samples_per_axis = n;
    r.spacing = ext.maxCoeff() / (n - 1);
    return r;
}

} // namespace magspec
