#pragma once

#include "magspec/domains.hpp"
#include "magspec/types.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace magspec {

/// Cell-centred Cartesian lattice covering a domain; only nodes with d > 0
/// are unknowns. Node coordinates are origin + h * index.
class Grid {
public:
    struct Link {
        int a, b; ///< interior node indices, b = a + e_axis
        int axis;
    };

    static Grid build(const Domain& dom, double h);

    int dimension() const { return dim_; }
    double h() const { return h_; }
    double cell_volume() const;
    const Vec3& origin() const { return origin_; }
    const std::array<int, 3>& shape() const { return shape_; }
    Box bounding_box() const;

    std::size_t size() const { return nodes_.size(); }
    Vec3 position(std::size_t node) const;
    const std::array<int, 3>& lattice_index(std::size_t node) const { return nodes_[node]; }
    /// Interior node index or -1.
    int find(int i, int j, int k) const;
    const std::vector<Link>& links() const { return links_; }
    /// Number of lattice neighbours that are not unknowns.
    int missing_neighbours(std::size_t node) const { return missing_[node]; }
    const std::vector<double>& distances() const { return dist_; }

    /// Lattice scaled about x0 by R; membership is checked against `scaled_domain`.
    Grid scaled(double R, const Vec3& x0, const Domain& scaled_domain) const;

private:
    void finalize();

    int dim_ = 3;
    double h_ = 0.0;
    Vec3 origin_ = Vec3::Zero();
    std::array<int, 3> shape_{1, 1, 1};
    std::vector<std::array<int, 3>> nodes_;
    std::vector<int> lookup_;
    std::vector<Link> links_;
    std::vector<int> missing_;
    std::vector<double> dist_;
};

} // namespace magspec
