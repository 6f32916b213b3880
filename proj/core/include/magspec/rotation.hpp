#pragma once

#include "magspec/types.hpp"

#include <cstdint>
#include <vector>

namespace magspec {

/// Proper rotation, validated on construction.
class Rotation {
public:
    Rotation() : m_(Mat3::Identity()) {}
    explicit Rotation(const Mat3& m); ///< throws unless orthogonal with det 1 (1e-12)

    static Rotation identity() { return Rotation(); }
    static Rotation from_quaternion(double w, double x, double y, double z);
    static Rotation from_axis_angle(const Vec3& axis, double angle);
    /// Some rotation taking e3 onto the unit vector v (minimal arc).
    static Rotation aligning_e3_to(const Vec3& v);

    const Mat3& matrix() const { return m_; }
    Vec3 operator*(const Vec3& v) const { return m_ * v; }
    Rotation operator*(const Rotation& o) const;
    Rotation transpose() const;

private:
    Mat3 m_;
};

/// Quasi-uniform SO3 samples from a super-Fibonacci spiral on unit
/// quaternions; seed != 0 applies a seeded global rotation.
std::vector<Rotation> sample_rotations(int n, std::uint64_t seed);

} // namespace magspec
