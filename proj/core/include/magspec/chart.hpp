#pragma once

#include "magspec/types.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>

namespace magspec {

struct Frame {
    Vec3 t1 = Vec3::UnitX();
    Vec3 t2 = Vec3::UnitY();
    Vec3 normal = Vec3::UnitZ(); ///< interior normal in boundary charts
};

/// Smooth local map y -> Phi(y) with analytic Jacobian. Immutable and
/// shareable; the callables must be pure.
struct ChartMap {
    std::function<Vec3(const Vec3&)> map;
    std::function<Mat3(const Vec3&)> jacobian;
    /// Optional local inverse; returns nullopt outside the chart.
    std::function<std::optional<Vec3>(const Vec3&)> inverse;
    Vec3 base_point = Vec3::Zero();
    Frame frame;
    double safe_radius = std::numeric_limits<double>::infinity();
    std::string label = "chart";

    Vec3 operator()(const Vec3& y) const { return map(y); }
};

ChartMap identity_chart();
/// y -> x0 + M y.
ChartMap affine_chart(const Mat3& M, const Vec3& x0 = Vec3::Zero());

} // namespace magspec
