#include "magspec/eigensolver.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <random>

namespace magspec {

std::string to_string(Preconditioner p) {
    switch (p) {
    case Preconditioner::Jacobi: return "jacobi";
    case Preconditioner::ShiftedFactorization: return "shifted-ldlt";
    default: return "auto";
    }
}

Preconditioner preconditioner_from_string(const std::string& s) {
    if (s == "jacobi") return Preconditioner::Jacobi;
    if (s == "shifted-ldlt" || s == "ldlt") return Preconditioner::ShiftedFactorization;
    if (s == "auto") return Preconditioner::Automatic;
    throw InvalidArgument("unknown preconditioner '" + s + "'");
}

namespace {

using Block = Eigen::MatrixXcd;

class PreconditionerOp {
public:
    PreconditionerOp(const DiscreteMagneticOperator& op, Preconditioner kind, double shift) : kind_(kind) {
        if (kind_ == Preconditioner::Automatic) {
            const std::size_t n = op.size();
            const bool small = op.grid().dimension() == 2 ? n <= 2'000'000 : n <= 400'000;
            kind_ = small ? Preconditioner::ShiftedFactorization : Preconditioner::Jacobi;
        }
        if (kind_ == Preconditioner::ShiftedFactorization) {
            const double s = shift > 0 ? shift : std::max(1.0, op.q());
            SparseMatrix M = op.matrix();
            for (int k = 0; k < M.outerSize(); ++k)
                for (SparseMatrix::InnerIterator it(M, k); it; ++it)
                    if (it.row() == it.col()) it.valueRef() += s;
            ldlt_.compute(M);
            if (ldlt_.info() != Eigen::Success) throw Error("factorization of the shifted operator failed");
        } else {
            inv_diag_ = op.diagonal().cwiseMax(1e-300).cwiseInverse();
        }
    }

    Block apply(const Block& R) const {
        if (kind_ == Preconditioner::ShiftedFactorization) return ldlt_.solve(R);
        return inv_diag_.asDiagonal() * R;
    }

    Preconditioner kind() const { return kind_; }

private:
    Preconditioner kind_;
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
    Eigen::VectorXd inv_diag_;
};

// Modified Gram-Schmidt (two passes) applied in lockstep to S and HS;
// columns that lose nearly all their norm are dropped.
void orthonormalize(Block& S, Block& HS) {
    const Eigen::Index n = S.rows();
    Block Q(n, S.cols()), HQ(n, S.cols());
    Eigen::Index kept = 0;
    for (Eigen::Index c = 0; c < S.cols(); ++c) {
        CVector v = S.col(c);
        CVector hv = HS.col(c);
        const double n0 = v.norm();
        if (!(n0 > 0)) continue;
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index k = 0; k < kept; ++k) {
                const cplx coef = Q.col(k).dot(v);
                v -= coef * Q.col(k);
                hv -= coef * HQ.col(k);
            }
        const double nv = v.norm();
        if (nv <= 1e-10 * n0) continue;
        Q.col(kept) = v / nv;
        HQ.col(kept) = hv / nv;
        ++kept;
    }
    S = Q.leftCols(kept);
    HS = HQ.leftCols(kept);
}

} // namespace

EigenResult lowest_eigenpair(const DiscreteMagneticOperator& op, double tol, int max_iter) {
    EigenOptions o;
    o.tol = tol;
    o.max_iter = max_iter;
    return lowest_eigenpair(op, o);
}

EigenResult lowest_eigenpair(const DiscreteMagneticOperator& op, const EigenOptions& opts) {
    if (!(opts.tol > 0)) throw InvalidArgument("eigensolver tolerance must be positive");
    const SparseMatrix& H = op.matrix();
    const Eigen::Index n = H.rows();
    const int m = static_cast<int>(std::min<Eigen::Index>(std::max(1, opts.block), n));

    EigenResult res;
    if (n <= 64) {
        // tiny problems: dense solve
        const Eigen::MatrixXcd dense = Eigen::MatrixXcd(H);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
        res.lambda = es.eigenvalues()[0];
        res.second_lambda = n > 1 ? es.eigenvalues()[1] : res.lambda;
        res.vector = es.eigenvectors().col(0);
        res.iterations = 0;
        res.preconditioner = "dense";
    } else {
        const PreconditionerOp T(op, opts.preconditioner, opts.shift);
        res.preconditioner = to_string(T.kind());

        std::mt19937_64 rng(opts.seed);
        std::normal_distribution<double> nd(0.0, 1.0);
        Block X(n, m);
        for (Eigen::Index c = 0; c < m; ++c)
            for (Eigen::Index i = 0; i < n; ++i) X(i, c) = cplx(nd(rng), nd(rng));
        if (opts.initial && opts.initial->size() == n) X.col(0) = *opts.initial;
        Block HX = H * X;
        orthonormalize(X, HX);

        auto ritz = [](const Block& S, const Block& HS, int want, Eigen::VectorXd& vals, Block& C) {
            Eigen::MatrixXcd G = S.adjoint() * HS;
            G = 0.5 * (G + G.adjoint()).eval();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
            vals = es.eigenvalues().head(want);
            C = es.eigenvectors().leftCols(want);
        };

        Eigen::VectorXd lam;
        Block C;
        ritz(X, HX, static_cast<int>(X.cols()), lam, C);
        X = X * C;
        HX = HX * C;
        Block P, HP;

        int it = 0;
        auto true_residual = [&](int col) { return (H * X.col(col) - lam[col] * X.col(col)).norm() / X.col(col).norm(); };
        for (; it < opts.max_iter; ++it) {
            Block R = HX - X * lam.asDiagonal();
            const double r0 = R.col(0).norm();
            if (r0 <= opts.tol) {
                // the tracked H X may drift; confirm with a fresh product
                HX = H * X;
                R = HX - X * lam.asDiagonal();
                if (R.col(0).norm() <= opts.tol) {
                    res.converged = true;
                    break;
                }
                P.resize(n, 0);
                HP.resize(n, 0);
            }
            Block W = T.apply(R);
            Block HW = H * W;
            const Eigen::Index k = X.cols() + W.cols() + P.cols();
            Block S(n, k), HS(n, k);
            S << X, W, P;
            HS << HX, HW, HP;
            orthonormalize(S, HS);
            const int want = static_cast<int>(std::min<Eigen::Index>(m, S.cols()));
            ritz(S, HS, want, lam, C);
            const Eigen::Index mx = std::min<Eigen::Index>(X.cols(), S.cols());
            X = S * C;
            HX = HS * C;
            P = S.rightCols(S.cols() - mx) * C.bottomRows(S.cols() - mx);
            HP = HS.rightCols(S.cols() - mx) * C.bottomRows(S.cols() - mx);
            if ((it + 1) % 50 == 0) {
                HX = H * X; // periodic refresh against drift
                ritz(X, HX, static_cast<int>(X.cols()), lam, C);
                X = X * C;
                HX = HX * C;
            }
        }
        res.iterations = it;
        res.lambda = lam[0];
        res.second_lambda = lam.size() > 1 ? lam[1] : lam[0];
        res.vector = X.col(0);
        if (X.cols() > 1) res.second_residual = true_residual(1);
    }

    // normalize to unit discrete L2 norm with the largest entry real positive
    CVector& v = res.vector;
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    const cplx ph = std::abs(v[imax]) > 0 ? std::conj(v[imax]) / std::abs(v[imax]) : cplx(1.0);
    v *= ph / std::sqrt(op.norm_sq(v));
    res.lambda = rayleigh(op, v);
    res.residual = (H * v - res.lambda * v).norm() / v.norm();
    if (res.preconditioner == "dense") res.converged = res.residual <= std::max(opts.tol, 1e-10);
    return res;
}

} // namespace magspec
