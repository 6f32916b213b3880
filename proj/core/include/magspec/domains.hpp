#pragma once

#include "magspec/chart.hpp"
#include "magspec/fields.hpp"
#include "magspec/types.hpp"

#include <string>
#include <variant>

namespace magspec {

struct Ball {
    Vec3 center = Vec3::Zero();
    double radius = 1.0;
};

struct Ellipsoid {
    Vec3 center = Vec3::Zero();
    Vec3 axes = Vec3::Ones();
};

/// Disk in the plane x3 = center.z; the third coordinate of query points is ignored.
struct Disk2D {
    Vec3 center = Vec3::Zero();
    double radius = 1.0;
};

class Domain {
public:
    using Variant = std::variant<Ball, Ellipsoid, Disk2D>;

    explicit Domain(Variant v);
    static Domain ball(const Vec3& c, double r) { return Domain(Ball{c, r}); }
    static Domain ellipsoid(const Vec3& c, const Vec3& axes) { return Domain(Ellipsoid{c, axes}); }
    static Domain disk(const Vec3& c, double r) { return Domain(Disk2D{c, r}); }

    const Variant& variant() const { return v_; }
    std::string kind() const;
    int dimension() const;
    Vec3 center() const;

    /// Distance to the boundary, positive inside.
    double signed_distance(const Vec3& x) const;
    /// Nearest boundary point.
    Vec3 project_to_boundary(const Vec3& x) const;
    /// Interior unit normal at (or nearest to) a boundary point.
    Vec3 interior_normal(const Vec3& boundary_point) const;
    bool contains(const Vec3& x) const { return signed_distance(x) > 0.0; }

    Box bounding_box() const;
    double inradius() const;
    double diameter() const;
    double min_curvature_radius() const;
    double volume() const; ///< area for a disk

private:
    Variant v_;
};

Domain scale_domain(const Domain& dom, double R, const Vec3& x0);

struct TangentPoint {
    Vec3 x0;
    Frame frame;
    double normal_flux = 0.0; ///< |B(x0) . nu|
};

/// Boundary point where B is tangent, with t1 along the tangential field.
TangentPoint find_tangent_point(const Domain& dom, const FieldSpec& B);

/// Frame at a boundary point: t1 along the tangential part of B, normal inward,
/// t2 = N x t1 (right-handed: t1, t2, N).
Frame tangent_frame(const Domain& dom, const Vec3& x0, const Vec3& B);

/// Phi(y) = pi(x0 + y1 t1 + y2 t2) + y3 N(pi(.)), pi the boundary projection.
ChartMap boundary_chart(const Domain& dom, const Vec3& x0, const Frame& frame, double safe_fraction = 0.5);

} // namespace magspec
