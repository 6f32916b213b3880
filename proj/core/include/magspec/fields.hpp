#pragma once

#include "magspec/chart.hpp"
#include "magspec/polynomial.hpp"
#include "magspec/rotation.hpp"
#include "magspec/types.hpp"

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <variant>

namespace magspec {

class FieldSpec;
using FieldPtr = std::shared_ptr<const FieldSpec>;

/// A(x) = B0 ^ x / 2.
struct LinearField {
    Vec3 B0 = Vec3::UnitZ();
};

/// A(x) = s Q n_tau(Q^t (x - origin)) with n_tau(z) = (cos tau z3, sin tau z3, 0);
/// s = 1/tau when normalized (tau > 0), else 1.
struct HelicalField {
    double tau = 0.0;
    Rotation Q;
    bool normalized = false;
    Vec3 origin = Vec3::Zero();
    double scale() const { return normalized ? 1.0 / tau : 1.0; }
};

/// A + grad(phi).
struct GaugeShiftedField {
    FieldPtr base;
    Polynomial3 phi;
};

struct PolynomialField {
    std::array<Polynomial3, 3> components;
};

/// The 1-form pulled back through a chart: A~(y) = DPhi(y)^t A(Phi(y)).
struct PullbackField {
    FieldPtr base;
    ChartMap chart;
};

/// A_R(x) = A(x0 + R (x - x0)) / R, the potential seen on the dilated domain
/// after rescaling back to the reference one.
struct DilatedField {
    FieldPtr base;
    double R = 1.0;
    Vec3 x0 = Vec3::Zero();
};

class FieldSpec {
public:
    using Variant =
        std::variant<LinearField, HelicalField, GaugeShiftedField, PolynomialField, PullbackField, DilatedField>;

    explicit FieldSpec(Variant v);

    const Variant& variant() const { return v_; }
    std::string kind() const;

    Vec3 potential(const Vec3& x) const;
    /// B = curl A; analytic except for pullbacks (finite differences).
    Vec3 field(const Vec3& x) const;
    /// G(i, j) = d_j B_i.
    Mat3 field_gradient(const Vec3& x) const;
    /// H[k](i, j) = d_k d_j B_i.
    std::array<Mat3, 3> field_hessian(const Vec3& x) const;

    /// Integral of A . dl on the straight segment a -> b.
    double line_integral(const Vec3& a, const Vec3& b) const;
    /// True when line_integral is exact up to rounding.
    bool exact_line_integral() const;
    /// True when A has polynomial components of degree <= 3.
    bool is_polynomial() const;
    /// True when |B| = 1 holds analytically.
    bool unit_intensity() const;

private:
    Variant v_;
};

FieldPtr linear_potential(const Vec3& B0);
/// Raw helical director x -> Q n_tau(Q^t x).
FieldPtr helical(double tau, const Rotation& Q = Rotation());
/// Intensity-one member n/tau of the helical class.
FieldPtr normalized_helical(double tau, const Rotation& Q = Rotation(), const Vec3& origin = Vec3::Zero());
FieldPtr gauge_shifted(FieldPtr base, const Polynomial3& phi);
FieldPtr polynomial_field(const std::array<Polynomial3, 3>& components);
FieldPtr pullback(FieldPtr base, const ChartMap& chart);
FieldPtr dilated(FieldPtr base, double R, const Vec3& x0 = Vec3::Zero());

/// curl A at x (analytic path when available).
Vec3 curl(const FieldSpec& A, const Vec3& x);
/// Central-difference curl with step h and a step-halving accuracy estimate.
struct FdCurl {
    Vec3 value;
    double relative_change;
};
FdCurl curl_fd(const std::function<Vec3(const Vec3&)>& A, const Vec3& x, double step = 1e-5);

/// u(x) = int_0^1 F(c + t (x - c)) . (x - c) dt; exact Gauss rule for
/// polynomial F, adaptive Gauss-Legendre to 1e-10 otherwise.
double poincare_gauge(const FieldSpec& F, const Vec3& x, const Vec3& center = Vec3::Zero());
double poincare_gauge(const std::function<Vec3(const Vec3&)>& F, const Vec3& x, const Vec3& center = Vec3::Zero(),
                      double tol = 1e-10);

/// Curl of the pulled-back 1-form DPhi^t A(Phi) in terms of B = curl A at Phi(y):
/// det(DPhi) DPhi^{-1} B.
Vec3 pullback_field(const ChartMap& chart, const Vec3& B, const Vec3& y);

struct SeminormReport {
    double sup_B = 0.0;
    double sup_gradB = 0.0;
    double sup_hessB = 0.0;
    double c1_norm_sq = 0.0;
    double c2_norm_sq = 0.0;
    int samples_per_axis = 0;
    double spacing = 0.0;

    static SeminormReport from_sups(double B, double gradB, double hessB);
};

/// Sup norms of |B|, |grad B|_F, |hess B|_F on a tensor mesh over the box.
SeminormReport seminorms(const FieldSpec& F, const Box& box, int samples = 4096);

} // namespace magspec
