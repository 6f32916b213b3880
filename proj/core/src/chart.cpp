#include "magspec/chart.hpp"

namespace magspec {

ChartMap identity_chart() { return affine_chart(Mat3::Identity()); }

ChartMap affine_chart(const Mat3& M, const Vec3& x0) {
    if (std::abs(M.determinant()) < 1e-300) throw InvalidArgument("affine chart needs an invertible matrix");
    const Mat3 Minv = M.inverse();
    ChartMap c;
    c.map = [M, x0](const Vec3& y) -> Vec3 { return x0 + M * y; };
    c.jacobian = [M](const Vec3&) -> Mat3 { return M; };
    c.inverse = [Minv, x0](const Vec3& x) -> std::optional<Vec3> { return Vec3(Minv * (x - x0)); };
    c.base_point = x0;
    c.frame = {M.col(0).normalized(), M.col(1).normalized(), M.col(2).normalized()};
    c.label = "affine";
    return c;
}

} // namespace magspec
