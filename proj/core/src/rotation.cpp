#include "magspec/rotation.hpp"

#include <cmath>
#include <random>

namespace magspec {

Rotation::Rotation(const Mat3& m) : m_(m) {
    const double orth = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
    const double det = m.determinant();
    if (orth > 1e-12 || std::abs(det - 1.0) > 1e-12) throw InvalidArgument("matrix is not a proper rotation");
}

Rotation Rotation::from_quaternion(double w, double x, double y, double z) {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (!(n > 0.0)) throw InvalidArgument("zero quaternion");
    w /= n;
    x /= n;
    y /= n;
    z /= n;
    Mat3 m;
    m << 1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w), //
        2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w),  //
        2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y);
    return Rotation(m);
}

Rotation Rotation::from_axis_angle(const Vec3& axis, double angle) {
    const Vec3 a = axis.normalized();
    const double s = std::sin(angle / 2);
    return from_quaternion(std::cos(angle / 2), a.x() * s, a.y() * s, a.z() * s);
}

Rotation Rotation::aligning_e3_to(const Vec3& v) {
    const Vec3 u = v.normalized();
    const Vec3 e3 = Vec3::UnitZ();
    const double c = e3.dot(u);
    if (c > 1.0 - 1e-15) return Rotation();
    if (c < -1.0 + 1e-15) return from_axis_angle(Vec3::UnitX(), pi);
    const Vec3 axis = e3.cross(u);
    return from_axis_angle(axis, std::atan2(axis.norm(), c));
}

Rotation Rotation::operator*(const Rotation& o) const {
    Rotation r;
    r.m_ = m_ * o.m_;
    return r;
}

Rotation Rotation::transpose() const {
    Rotation r;
    r.m_ = m_.transpose();
    return r;
}

std::vector<Rotation> sample_rotations(int n, std::uint64_t seed) {
    if (n <= 0) throw InvalidArgument("rotation sample count must be positive");
    // super-Fibonacci spiral constants
    const double phi = std::sqrt(2.0);
    const double psi = 1.533751168755204288118041;
    Rotation offset;
    if (seed != 0) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double u1 = u(rng), u2 = u(rng), u3 = u(rng);
        const double a = std::sqrt(1 - u1), b = std::sqrt(u1);
        offset = Rotation::from_quaternion(a * std::sin(2 * pi * u2), a * std::cos(2 * pi * u2),
                                           b * std::sin(2 * pi * u3), b * std::cos(2 * pi * u3));
    }
    std::vector<Rotation> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double s = i + 0.5;
        const double r = std::sqrt(s / n);
        const double R = std::sqrt(1.0 - s / n);
        const double alpha = 2 * pi * s / phi;
        const double beta = 2 * pi * s / psi;
        out.push_back(offset * Rotation::from_quaternion(r * std::sin(alpha), r * std::cos(alpha),
                                                         R * std::sin(beta), R * std::cos(beta)));
    }
    return out;
}

} // namespace magspec
