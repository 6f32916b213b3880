#pragma once

#include "magspec/magop.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace magspec {

enum class Preconditioner {
    Jacobi,               ///< inverse diagonal
    ShiftedFactorization, ///< exact (H + s I)^{-1} by sparse LDL^*
    Automatic,
};

std::string to_string(Preconditioner p);
Preconditioner preconditioner_from_string(const std::string& s);

struct EigenOptions {
    double tol = 1e-8;
    int max_iter = 3000;
    int block = 2;
    Preconditioner preconditioner = Preconditioner::Automatic;
    /// Shift s of the factorized preconditioner; <= 0 selects max(1, q).
    double shift = 0.0;
    std::uint64_t seed = 20240611;
    std::optional<CVector> initial;
};

struct EigenResult {
    double lambda = 0.0;
    /// Unit discrete L2 norm (h^d sum |v|^2 = 1); largest entry real positive.
    CVector vector;
    /// ||H v - lambda v|| / ||v||.
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    double second_lambda = 0.0;
    double second_residual = 0.0;
    std::string preconditioner;
};

/// Block LOBPCG for the lowest eigenpair of a Hermitian positive semidefinite operator.
EigenResult lowest_eigenpair(const DiscreteMagneticOperator& op, const EigenOptions& opts = {});
EigenResult lowest_eigenpair(const DiscreteMagneticOperator& op, double tol, int max_iter);

} // namespace magspec
