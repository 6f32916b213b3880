#pragma once

#include "magspec/domains.hpp"
#include "magspec/fields.hpp"
#include "magspec/grid.hpp"
#include "magspec/types.hpp"

#include <Eigen/SparseCore>

#include <memory>
#include <string>
#include <vector>

namespace magspec {

enum class BoundaryCondition { Neumann, Dirichlet };

std::string to_string(BoundaryCondition bc);
BoundaryCondition boundary_condition_from_string(const std::string& s);

using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::ColMajor, int>;

/// Link-phase discretization of (i grad + qA)^2 on the interior nodes of a grid:
/// H(a, b) = -exp(-i theta_ab) / h^2 with theta_ab = q int_a^b A.dl, diagonal
/// = (#interior neighbours [+ #missing neighbours for Dirichlet]) / h^2.
class DiscreteMagneticOperator {
public:
    DiscreteMagneticOperator(std::shared_ptr<const Grid> grid, BoundaryCondition bc, double q,
                             std::vector<double> link_phase);

    const Grid& grid() const { return *grid_; }
    std::shared_ptr<const Grid> grid_ptr() const { return grid_; }
    BoundaryCondition bc() const { return bc_; }
    double q() const { return q_; }
    const std::vector<double>& link_phase() const { return phase_; }
    const SparseMatrix& matrix() const { return H_; }
    std::size_t size() const { return grid_->size(); }
    const Eigen::VectorXd& diagonal() const { return diag_; }

    CVector apply(const CVector& u) const { return H_ * u; }
    /// Discrete quadratic form h^d <u, H u>, evaluated link by link.
    double form(const CVector& u) const;
    /// Discrete L2 norm squared h^d sum |u|^2.
    double norm_sq(const CVector& u) const;

private:
    std::shared_ptr<const Grid> grid_;
    BoundaryCondition bc_;
    double q_;
    std::vector<double> phase_;
    SparseMatrix H_;
    Eigen::VectorXd diag_;
};

struct AssemblyOptions {
    int threads = 1;
};

/// Throws DiscretizationError for h > 1/sqrt(q); warns for h > 0.5/sqrt(q).
DiscreteMagneticOperator assemble(const Domain& dom, const FieldSpec& A, double q, BoundaryCondition bc,
                                  std::shared_ptr<const Grid> grid, const AssemblyOptions& opts = {});
DiscreteMagneticOperator assemble(const Domain& dom, const FieldSpec& A, double q, BoundaryCondition bc,
                                  const Grid& grid, const AssemblyOptions& opts = {});

/// <Hu, u> / <u, u>; throws on a zero vector or a non-negligible imaginary part.
double rayleigh(const DiscreteMagneticOperator& op, const CVector& u);

/// Smooth bump of unit radius: exp(1 - 1/(1 - s^2)) on [0, 1), zero after.
double bump(double s);
double bump_derivative(double s);

/// chi_j = b_j / sqrt(sum_k b_k^2) with b_j(x) = bump(|x - x_j| / r).
class PartitionOfUnity {
public:
    PartitionOfUnity(std::vector<Vec3> centers, double r, std::shared_ptr<const Grid> grid);

    const std::vector<Vec3>& centers() const { return centers_; }
    double radius() const { return r_; }
    std::size_t size() const { return centers_.size(); }

    double chi(std::size_t j, const Vec3& x) const;
    Vec3 grad_chi(std::size_t j, const Vec3& x) const;

    /// All cut-offs that do not vanish at x, with their gradients.
    struct Local {
        std::vector<std::size_t> index;
        std::vector<double> chi;
        std::vector<Vec3> grad;
    };
    Local local(const Vec3& x) const;
    /// Sampled chi_j on interior nodes, as (node, value) pairs with value > 0.
    const std::vector<std::pair<int, double>>& weights(std::size_t j) const { return weights_[j]; }

    /// max over nodes of r^2 sum_j |grad chi_j|^2.
    double gradient_constant() const { return c_sum_; }
    /// max over nodes and j of r^2 |grad chi_j|^2.
    double single_gradient_constant() const { return c_single_; }
    /// max over nodes of |sum_j chi_j^2 - 1|.
    double normalization_defect() const { return defect_; }

private:
    std::vector<Vec3> centers_;
    double r_;
    std::shared_ptr<const Grid> grid_;
    std::vector<std::vector<std::pair<int, double>>> weights_;
    double c_sum_ = 0.0;
    double c_single_ = 0.0;
    double defect_ = 0.0;
};

/// Lattice of centres with spacing r / sqrt(dim) covering the r-neighbourhood of the domain.
PartitionOfUnity make_partition(const Domain& dom, std::shared_ptr<const Grid> grid, double r);
PartitionOfUnity make_partition(std::vector<Vec3> centers, std::shared_ptr<const Grid> grid, double r);

struct ImsReport {
    double lhs = 0.0; ///< q(u)
    double rhs = 0.0; ///< sum_j q(chi_j u) - sum_j || |grad chi_j| u ||^2
    double gap = 0.0;
    double norm_sq = 0.0;
};

ImsReport verify_ims(const DiscreteMagneticOperator& op, const PartitionOfUnity& partition, const CVector& u);

} // namespace magspec
