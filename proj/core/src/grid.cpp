#include "magspec/grid.hpp"

#include <cmath>

namespace magspec {

Grid Grid::build(const Domain& dom, double h) {
    if (!(h > 0)) throw InvalidArgument("grid spacing must be positive");
    Grid g;
    g.dim_ = dom.dimension();
    g.h_ = h;
    const Box box = dom.bounding_box();
    const Vec3 c = 0.5 * (box.lo + box.hi);
    for (int k = 0; k < 3; ++k) {
        if (k < g.dim_) {
            const double half = 0.5 * (box.hi[k] - box.lo[k]);
            const int n = static_cast<int>(std::ceil(half / h)) + 1;
            g.shape_[k] = 2 * n;
            g.origin_[k] = c[k] - h * (n - 0.5);
        } else {
            g.shape_[k] = 1;
            g.origin_[k] = c[k];
        }
    }
    const int nx = g.shape_[0], ny = g.shape_[1], nz = g.shape_[2];
    g.lookup_.assign(static_cast<std::size_t>(nx) * ny * nz, -1);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const Vec3 x = g.origin_ + h * Vec3(i, j, k);
                const double d = dom.signed_distance(x);
                if (d > 0) {
                    g.lookup_[(static_cast<std::size_t>(k) * ny + j) * nx + i] = static_cast<int>(g.nodes_.size());
                    g.nodes_.push_back({i, j, k});
                    g.dist_.push_back(d);
                }
            }
    if (g.nodes_.empty()) throw DiscretizationError("grid has no interior nodes");
    g.finalize();
    return g;
}

void Grid::finalize() {
    links_.clear();
    missing_.assign(nodes_.size(), 0);
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
        const auto& idx = nodes_[n];
        for (int axis = 0; axis < dim_; ++axis) {
            auto nb = idx;
            nb[axis] += 1;
            const int up = find(nb[0], nb[1], nb[2]);
            if (up >= 0)
                links_.push_back({static_cast<int>(n), up, axis});
            else
                ++missing_[n];
            nb[axis] -= 2;
            if (find(nb[0], nb[1], nb[2]) < 0) ++missing_[n];
        }
    }
}

double Grid::cell_volume() const { return std::pow(h_, dim_); }

Box Grid::bounding_box() const {
    Vec3 hi = origin_;
    for (int k = 0; k < 3; ++k) hi[k] += h_ * (shape_[k] - 1);
    return {origin_, hi};
}

Vec3 Grid::position(std::size_t node) const {
    const auto& idx = nodes_[node];
    return origin_ + h_ * Vec3(idx[0], idx[1], idx[2]);
}

int Grid::find(int i, int j, int k) const {
    if (i < 0 || j < 0 || k < 0 || i >= shape_[0] || j >= shape_[1] || k >= shape_[2]) return -1;
    return lookup_[(static_cast<std::size_t>(k) * shape_[1] + j) * shape_[0] + i];
}

Grid Grid::scaled(double R, const Vec3& x0, const Domain& scaled_domain) const {
    if (!(R > 0)) throw InvalidArgument("scale factor must be positive");
    if (scaled_domain.dimension() != dim_) throw InvalidArgument("scaled domain dimension mismatch");
    Grid g = *this;
    g.h_ = R * h_;
    for (int k = 0; k < dim_; ++k) g.origin_[k] = x0[k] + R * (origin_[k] - x0[k]);
    // every lattice point must keep its membership under the similarity
    for (int k = 0; k < shape_[2]; ++k)
        for (int j = 0; j < shape_[1]; ++j)
            for (int i = 0; i < shape_[0]; ++i) {
                const Vec3 x = g.origin_ + g.h_ * Vec3(i, j, k);
                const int n = find(i, j, k);
                const double d = scaled_domain.signed_distance(x);
                if ((d > 0) != (n >= 0)) throw GeometryError("scaled grid does not match the scaled domain");
                if (n >= 0) g.dist_[n] = d;
            }
    return g;
}

} // namespace magspec
