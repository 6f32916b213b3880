#include "magspec/domains.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace magspec {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Safeguarded Newton on a decreasing function with a sign change on [lo, hi].
template <class F, class DF>
double safeguarded_root(F f, DF df, double lo, double hi) {
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double v = f(s);
        if (v == 0.0) return s;
        if (v > 0.0)
            lo = s;
        else
            hi = s;
        if (hi - lo <= 1e-15 * std::max(1.0, std::abs(s))) break;
        const double d = df(s);
        double next = (d != 0.0) ? s - v / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi); // bisection fallback
        if (std::abs(next - s) <= 1e-16 * std::max(1.0, std::abs(s))) return next;
        s = next;
    }
    return s;
}

// Closest point on the ellipse (e0 >= e1) to (y0, y1) in the first quadrant.
std::array<double, 2> closest_ellipse(double e0, double e1, double y0, double y1) {
    if (y1 > 0) {
        if (y0 > 0) {
            const double z0 = y0 / e0, z1 = y1 / e1;
            const double g = z0 * z0 + z1 * z1 - 1.0;
            if (g == 0.0) return {y0, y1};
            const double r0 = (e0 / e1) * (e0 / e1);
            const double n0 = r0 * z0;
            auto f = [&](double s) {
                const double a = n0 / (s + r0), b = z1 / (s + 1);
                return a * a + b * b - 1.0;
            };
            auto df = [&](double s) {
                const double a = n0 / (s + r0), b = z1 / (s + 1);
                return -2.0 * (a * a / (s + r0) + b * b / (s + 1));
            };
            const double lo = z1 - 1.0;
            const double hi = (g < 0) ? 0.0 : std::hypot(n0, z1) - 1.0;
            const double s = safeguarded_root(f, df, lo, hi);
            return {r0 * y0 / (s + r0), y1 / (s + 1)};
        }
        return {0.0, e1};
    }
    const double numer0 = e0 * y0;
    const double denom0 = e0 * e0 - e1 * e1;
    if (numer0 < denom0) {
        const double xde0 = numer0 / denom0;
        return {e0 * xde0, e1 * std::sqrt(std::max(0.0, 1.0 - xde0 * xde0))};
    }
    return {e0, 0.0};
}

// Closest point on the ellipsoid (e0 >= e1 >= e2) to y in the first octant.
std::array<double, 3> closest_ellipsoid(const std::array<double, 3>& e, const std::array<double, 3>& y) {
    const double e0 = e[0], e1 = e[1], e2 = e[2];
    const double y0 = y[0], y1 = y[1], y2 = y[2];
    if (y2 > 0) {
        if (y1 > 0) {
            if (y0 > 0) {
                const double z0 = y0 / e0, z1 = y1 / e1, z2 = y2 / e2;
                const double g = z0 * z0 + z1 * z1 + z2 * z2 - 1.0;
                if (g == 0.0) return {y0, y1, y2};
                const double r0 = (e0 / e2) * (e0 / e2), r1 = (e1 / e2) * (e1 / e2);
                const double n0 = r0 * z0, n1 = r1 * z1;
                auto f = [&](double s) {
                    const double a = n0 / (s + r0), b = n1 / (s + r1), c = z2 / (s + 1);
                    return a * a + b * b + c * c - 1.0;
                };
                auto df = [&](double s) {
                    const double a = n0 / (s + r0), b = n1 / (s + r1), c = z2 / (s + 1);
                    return -2.0 * (a * a / (s + r0) + b * b / (s + r1) + c * c / (s + 1));
                };
                const double lo = z2 - 1.0;
                const double hi = (g < 0) ? 0.0 : std::sqrt(n0 * n0 + n1 * n1 + z2 * z2) - 1.0;
                const double s = safeguarded_root(f, df, lo, hi);
                return {r0 * y0 / (s + r0), r1 * y1 / (s + r1), y2 / (s + 1)};
            }
            const auto p = closest_ellipse(e1, e2, y1, y2);
            return {0.0, p[0], p[1]};
        }
        if (y0 > 0) {
            const auto p = closest_ellipse(e0, e2, y0, y2);
            return {p[0], 0.0, p[1]};
        }
        return {0.0, 0.0, e2};
    }
    const double denom0 = e0 * e0 - e2 * e2, denom1 = e1 * e1 - e2 * e2;
    const double numer0 = e0 * y0, numer1 = e1 * y1;
    if (numer0 < denom0 && numer1 < denom1) {
        const double xde0 = numer0 / denom0, xde1 = numer1 / denom1;
        const double discr = 1.0 - xde0 * xde0 - xde1 * xde1;
        if (discr > 0) return {e0 * xde0, e1 * xde1, e2 * std::sqrt(discr)};
    }
    const auto p = closest_ellipse(e0, e1, y0, y1);
    return {p[0], p[1], 0.0};
}

Vec3 ellipsoid_projection(const Ellipsoid& E, const Vec3& x) {
    const Vec3 p = x - E.center;
    std::array<int, 3> perm{0, 1, 2};
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) { return E.axes[a] > E.axes[b]; });
    std::array<double, 3> e{}, y{};
    for (int k = 0; k < 3; ++k) {
        e[k] = E.axes[perm[k]];
        y[k] = std::abs(p[perm[k]]);
    }
    const auto c = closest_ellipsoid(e, y);
    Vec3 out;
    for (int k = 0; k < 3; ++k) out[perm[k]] = std::copysign(c[k], p[perm[k]]);
    return E.center + out;
}

Vec3 ellipsoid_outward_gradient(const Ellipsoid& E, const Vec3& b) {
    const Vec3 p = b - E.center;
    return Vec3(p[0] / (E.axes[0] * E.axes[0]), p[1] / (E.axes[1] * E.axes[1]), p[2] / (E.axes[2] * E.axes[2]));
}

// Radial direction from the centre, with a fixed direction at the centre itself.
Vec3 radial(const Vec3& d) {
    const double r = d.norm();
    return r > 0 ? Vec3(d / r) : Vec3::UnitX();
}

} // namespace

Domain::Domain(Variant v) : v_(std::move(v)) {
    std::visit(overloaded{
                   [](const Ball& b) {
                       if (!(b.radius > 0)) throw InvalidArgument("ball radius must be positive");
                   },
                   [](const Disk2D& b) {
                       if (!(b.radius > 0)) throw InvalidArgument("disk radius must be positive");
                   },
                   [](const Ellipsoid& e) {
                       if (!(e.axes.minCoeff() > 0)) throw InvalidArgument("ellipsoid axes must be positive");
                   },
               },
               v_);
}

std::string Domain::kind() const {
    return std::visit(overloaded{[](const Ball&) { return std::string("ball"); },
                                 [](const Ellipsoid&) { return std::string("ellipsoid"); },
                                 [](const Disk2D&) { return std::string("disk2d"); }},
                      v_);
}

int Domain::dimension() const { return std::holds_alternative<Disk2D>(v_) ? 2 : 3; }

Vec3 Domain::center() const {
    return std::visit([](const auto& d) { return d.center; }, v_);
}

double Domain::signed_distance(const Vec3& x) const {
    return std::visit(overloaded{
                          [&](const Ball& b) { return b.radius - (x - b.center).norm(); },
                          [&](const Disk2D& b) {
                              return b.radius - std::hypot(x[0] - b.center[0], x[1] - b.center[1]);
                          },
                          [&](const Ellipsoid& E) {
                              const Vec3 p = x - E.center;
                              const double g = (p.array() / E.axes.array()).square().sum();
                              const double dist = (ellipsoid_projection(E, x) - x).norm();
                              return g < 1.0 ? dist : -dist;
                          },
                      },
                      v_);
}

Vec3 Domain::project_to_boundary(const Vec3& x) const {
    return std::visit(overloaded{
                          [&](const Ball& b) -> Vec3 { return b.center + b.radius * radial(x - b.center); },
                          [&](const Disk2D& b) -> Vec3 {
                              Vec3 d(x[0] - b.center[0], x[1] - b.center[1], 0.0);
                              Vec3 p = b.center + b.radius * radial(d);
                              p[2] = x[2];
                              return p;
                          },
                          [&](const Ellipsoid& E) -> Vec3 { return ellipsoid_projection(E, x); },
                      },
                      v_);
}

Vec3 Domain::interior_normal(const Vec3& boundary_point) const {
    return std::visit(overloaded{
                          [&](const Ball& b) -> Vec3 { return -radial(boundary_point - b.center); },
                          [&](const Disk2D& b) -> Vec3 {
                              return -radial(Vec3(boundary_point[0] - b.center[0],
                                                  boundary_point[1] - b.center[1], 0.0));
                          },
                          [&](const Ellipsoid& E) -> Vec3 {
                              const Vec3 p = ellipsoid_projection(E, boundary_point);
                              return -ellipsoid_outward_gradient(E, p).normalized();
                          },
                      },
                      v_);
}

Box Domain::bounding_box() const {
    return std::visit(overloaded{
                          [](const Ball& b) { return Box{b.center.array() - b.radius, b.center.array() + b.radius}; },
                          [](const Disk2D& b) {
                              Box box{b.center.array() - b.radius, b.center.array() + b.radius};
                              box.lo[2] = box.hi[2] = b.center[2];
                              return box;
                          },
                          [](const Ellipsoid& E) { return Box{E.center - E.axes, E.center + E.axes}; },
                      },
                      v_);
}

double Domain::inradius() const {
    return std::visit(overloaded{[](const Ball& b) { return b.radius; }, [](const Disk2D& b) { return b.radius; },
                                 [](const Ellipsoid& E) { return E.axes.minCoeff(); }},
                      v_);
}

double Domain::diameter() const {
    return std::visit(overloaded{[](const Ball& b) { return 2 * b.radius; },
                                 [](const Disk2D& b) { return 2 * b.radius; },
                                 [](const Ellipsoid& E) { return 2 * E.axes.maxCoeff(); }},
                      v_);
}

double Domain::min_curvature_radius() const {
    return std::visit(overloaded{[](const Ball& b) { return b.radius; }, [](const Disk2D& b) { return b.radius; },
                                 [](const Ellipsoid& E) {
                                     const double c = E.axes.minCoeff();
                                     return c * c / E.axes.maxCoeff();
                                 }},
                      v_);
}

double Domain::volume() const {
    return std::visit(
        overloaded{[](const Ball& b) { return 4.0 / 3.0 * pi * std::pow(b.radius, 3); },
                   [](const Disk2D& b) { return pi * b.radius * b.radius; },
                   [](const Ellipsoid& E) { return 4.0 / 3.0 * pi * E.axes.prod(); }},
        v_);
}

Domain scale_domain(const Domain& dom, double R, const Vec3& x0) {
    if (!(R > 0)) throw InvalidArgument("scale factor must be positive");
    return std::visit(overloaded{
                          [&](const Ball& b) { return Domain::ball(x0 + R * (b.center - x0), R * b.radius); },
                          [&](const Disk2D& b) {
                              Vec3 c = x0 + R * (b.center - x0);
                              c[2] = b.center[2];
                              return Domain::disk(c, R * b.radius);
                          },
                          [&](const Ellipsoid& E) {
                              return Domain::ellipsoid(x0 + R * (E.center - x0), R * E.axes);
                          },
                      },
                      dom.variant());
}

Frame tangent_frame(const Domain& dom, const Vec3& x0, const Vec3& B) {
    Frame f;
    f.normal = dom.interior_normal(x0);
    Vec3 bt;
    if (dom.dimension() == 2)
        bt = Vec3(0, 0, B[2]);
    else
        bt = B - B.dot(f.normal) * f.normal;
    if (bt.norm() < 1e-8) throw GeometryError("tangent frame undefined: tangential field vanishes");
    f.t1 = bt.normalized();
    f.t2 = f.normal.cross(f.t1);
    return f;
}

TangentPoint find_tangent_point(const Domain& dom, const FieldSpec& B) {
    TangentPoint tp;
    if (const auto* disk = std::get_if<Disk2D>(&dom.variant())) {
        // in the cross-section model the field is normal to the plane, hence tangent everywhere
        tp.x0 = disk->center + Vec3(disk->radius, 0, 0);
        tp.frame = tangent_frame(dom, tp.x0, B.field(tp.x0));
        tp.normal_flux = 0.0;
        return tp;
    }

    const Vec3 c = dom.center();
    const Vec3 axes = std::visit(overloaded{[](const Ball& b) { return Vec3(Vec3::Constant(b.radius)); },
                                            [](const Ellipsoid& e) { return e.axes; },
                                            [](const Disk2D& b) { return Vec3(Vec3::Constant(b.radius)); }},
                                 dom.variant());
    auto point = [&](double th, double ph) {
        return Vec3(c + axes.cwiseProduct(Vec3(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th))));
    };
    auto flux = [&](double th, double ph) {
        const Vec3 x = point(th, ph);
        return B.field(x).dot(dom.interior_normal(x));
    };

    constexpr int nt = 128, np = 256;
    std::vector<double> f((nt + 1) * np);
    for (int i = 0; i <= nt; ++i)
        for (int j = 0; j < np; ++j) f[i * np + j] = flux(pi * i / nt, 2 * pi * j / np);

    struct Candidate {
        double th, ph, val;
        Vec3 x;
    };
    std::vector<Candidate> cand;
    auto consider = [&](double th, double ph) {
        cand.push_back({th, ph, std::abs(flux(th, ph)), point(th, ph)});
    };
    for (int i = 0; i <= nt; ++i)
        for (int j = 0; j < np; ++j) {
            const double th = pi * i / nt, ph = 2 * pi * j / np;
            const double v = f[i * np + j];
            if (std::abs(v) <= 1e-3) consider(th, ph);
            // sign changes along mesh edges, linearly interpolated
            const double vr = f[i * np + (j + 1) % np];
            if (v * vr < 0) consider(th, ph + (2 * pi / np) * v / (v - vr));
            if (i < nt) {
                const double vd = f[(i + 1) * np + j];
                if (v * vd < 0) consider(th + (pi / nt) * v / (v - vd), ph);
            }
        }
    if (cand.empty()) throw GeometryError("no boundary point with |B.nu| below 1e-3 on the scan mesh");

    // polish each of a few leading candidates by Newton projection onto the zero set
    auto polish = [&](Candidate cd) {
        for (int it = 0; it < 50 && cd.val > 1e-14; ++it) {
            const double e = 1e-7;
            const double v = flux(cd.th, cd.ph);
            const double gt = (flux(cd.th + e, cd.ph) - flux(cd.th - e, cd.ph)) / (2 * e);
            const double gp = (flux(cd.th, cd.ph + e) - flux(cd.th, cd.ph - e)) / (2 * e);
            const double g2 = gt * gt + gp * gp;
            if (g2 < 1e-30) break;
            cd.th -= v * gt / g2;
            cd.ph -= v * gp / g2;
            cd.val = std::abs(flux(cd.th, cd.ph));
        }
        cd.x = point(cd.th, cd.ph);
        return cd;
    };
    auto lexless = [](const Vec3& a, const Vec3& b) {
        for (int k = 0; k < 3; ++k) {
            if (a[k] < b[k] - 1e-12) return true;
            if (a[k] > b[k] + 1e-12) return false;
        }
        return false;
    };
    std::sort(cand.begin(), cand.end(), [&](const Candidate& a, const Candidate& b) {
        if (std::abs(a.val - b.val) > 1e-12) return a.val < b.val;
        return lexless(a.x, b.x);
    });
    const std::size_t keep = std::min<std::size_t>(cand.size(), 16);
    std::vector<Candidate> polished;
    for (std::size_t k = 0; k < keep; ++k) polished.push_back(polish(cand[k]));
    std::sort(polished.begin(), polished.end(), [&](const Candidate& a, const Candidate& b) {
        const bool ta = a.val <= 1e-12, tb = b.val <= 1e-12;
        if (ta != tb) return ta;
        if (!ta && a.val != b.val) return a.val < b.val;
        return lexless(a.x, b.x);
    });
    const Candidate& best = polished.front();
    if (best.val > 1e-8) throw GeometryError("tangent point polishing did not reach |B.nu| <= 1e-8");
    tp.x0 = best.x;
    tp.normal_flux = best.val;
    tp.frame = tangent_frame(dom, tp.x0, B.field(tp.x0));
    return tp;
}

namespace {

// Analytic Jacobians of the boundary projection p(w) and of N(p(w)).
struct ProjectionJacobian {
    Mat3 Dp;
    Mat3 DN;
};

ProjectionJacobian projection_jacobian(const Domain& dom, const Vec3& w) {
    return std::visit(
        overloaded{
            [&](const Ball& b) {
                const Vec3 d = w - b.center;
                const double r = d.norm();
                const Vec3 u = radial(d);
                const Mat3 P = Mat3::Identity() - u * u.transpose();
                return ProjectionJacobian{b.radius / r * P, -P / r};
            },
            [&](const Disk2D& b) {
                Vec3 d(w[0] - b.center[0], w[1] - b.center[1], 0.0);
                const double r = d.norm();
                const Vec3 u = radial(d);
                Mat3 P = Mat3::Identity() - u * u.transpose();
                P(2, 2) = 0.0;
                Mat3 Dp = b.radius / r * P;
                Dp(2, 2) = 1.0;
                return ProjectionJacobian{Dp, -P / r};
            },
            [&](const Ellipsoid& E) {
                // p_i = w_i a_i^2 / (a_i^2 + t) with t fixed by the boundary constraint
                const Vec3 p = ellipsoid_projection(E, w);
                const Vec3 a2 = E.axes.array().square();
                const Vec3 v = ellipsoid_outward_gradient(E, p);
                const double t = (w - p).dot(v) / v.squaredNorm();
                Vec3 Gw, dpdt;
                double Gt = 0.0;
                const Vec3 wc = w - E.center;
                for (int i = 0; i < 3; ++i) {
                    const double s = a2[i] + t;
                    Gw[i] = 2.0 * wc[i] * a2[i] / (s * s);
                    Gt += -2.0 * wc[i] * wc[i] * a2[i] / (s * s * s);
                    dpdt[i] = -wc[i] * a2[i] / (s * s);
                }
                const Vec3 dt = -Gw / Gt;
                Mat3 Dp = Mat3::Zero();
                for (int i = 0; i < 3; ++i) Dp(i, i) = a2[i] / (a2[i] + t);
                Dp += dpdt * dt.transpose();
                Mat3 Dv = Dp;
                for (int i = 0; i < 3; ++i) Dv.row(i) /= a2[i];
                const double vn = v.norm();
                const Vec3 n = v / vn;
                const Mat3 DN = -(Mat3::Identity() - n * n.transpose()) * Dv / vn;
                return ProjectionJacobian{Dp, DN};
            },
        },
        dom.variant());
}

} // namespace

ChartMap boundary_chart(const Domain& dom, const Vec3& x0, const Frame& frame, double safe_fraction) {
    if (std::abs(dom.signed_distance(x0)) > 1e-8) throw GeometryError("chart base point is not on the boundary");
    ChartMap c;
    c.base_point = x0;
    c.frame = frame;
    c.safe_radius = safe_fraction * dom.min_curvature_radius();
    c.label = dom.kind() + "-boundary";
    const Domain d = dom;
    const Frame fr = frame;
    c.map = [d, x0, fr](const Vec3& y) -> Vec3 {
        const Vec3 w = x0 + y[0] * fr.t1 + y[1] * fr.t2;
        const Vec3 p = d.project_to_boundary(w);
        return p + y[2] * d.interior_normal(p);
    };
    c.jacobian = [d, x0, fr](const Vec3& y) -> Mat3 {
        const Vec3 w = x0 + y[0] * fr.t1 + y[1] * fr.t2;
        const auto J = projection_jacobian(d, w);
        const Mat3 D = J.Dp + y[2] * J.DN;
        Mat3 out;
        out.col(0) = D * fr.t1;
        out.col(1) = D * fr.t2;
        out.col(2) = d.interior_normal(d.project_to_boundary(w));
        return out;
    };
    c.inverse = [d, x0, fr](const Vec3& x) -> std::optional<Vec3> {
        const double y3 = d.signed_distance(x);
        const Vec3 p = d.project_to_boundary(x);
        const Vec3 n = d.interior_normal(p);
        const double cosang = n.dot(fr.normal);
        if (cosang < 0.2) return std::nullopt;
        const double s = -(p - x0).dot(fr.normal) / cosang;
        const Vec3 w = p + s * n;
        return Vec3((w - x0).dot(fr.t1), (w - x0).dot(fr.t2), y3);
    };
    return c;
}

} // namespace magspec
