#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qmeas/errors.hpp"

namespace qmeas {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

template <class Scalar>
struct LeastNormResult
{
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
    Eigen::Index rank = 0;
    double residual = 0.0;  ///< ||A x - b||_2
};

/// Minimum-norm least-squares solution of A x = b (pseudo-inverse contract).
///
/// `rank_tol` is relative to the largest pivot; leave it empty to use
/// Eigen's default threshold.
template <class Scalar>
[[nodiscard]] LeastNormResult<Scalar> least_norm_solve_detailed(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b, std::optional<double> rank_tol = std::nullopt)
{
    if (A.rows() != b.size())
        throw invalid_input("least_norm_solve: A has " + std::to_string(A.rows()) + " rows but b has " +
                            std::to_string(b.size()) + " entries");
    if (!A.allFinite() || !b.allFinite())
        throw invalid_input("least_norm_solve: non-finite input");
    LeastNormResult<Scalar> out;
    if (A.cols() == 0) {
        out.x.resize(0);
        out.residual = b.norm();
        return out;
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> cod;
    if (rank_tol)
        cod.setThreshold(*rank_tol);
    cod.compute(A);
    out.x = cod.solve(b);
    out.rank = cod.rank();
    out.residual = (A * out.x - b).norm();
    return out;
}

[[nodiscard]] inline CVector least_norm_solve(const CMatrix& A, const CVector& b)
{
    return least_norm_solve_detailed<cplx>(A, b).x;
}

[[nodiscard]] inline RVector least_norm_solve(const RMatrix& A, const RVector& b)
{
    return least_norm_solve_detailed<double>(A, b).x;
}

/// Largest absolute deviation from Hermiticity, relative to max |M_ij|.
[[nodiscard]] inline double hermiticity_defect(const CMatrix& M)
{
    if (M.rows() != M.cols())
        return INFINITY;
    const double scale = M.cwiseAbs().maxCoeff();
    if (scale == 0.0)
        return 0.0;
    return (M - M.adjoint()).cwiseAbs().maxCoeff() / scale;
}

/// Rotates `v` so its largest-magnitude entry is real and positive.
/// Returns the index of that entry (lowest index on ties).
inline Eigen::Index fix_phase(Eigen::Ref<CVector> v)
{
    Eigen::Index best = 0;
    double best_mag = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double m = std::abs(v(i));
        // ties within rounding go to the lower index
        if (m > best_mag * (1.0 + 1e-12)) {
            best_mag = m;
            best = i;
        }
    }
    if (best_mag > 0.0)
        v *= std::conj(v(best)) / best_mag;
    return best;
}

struct HermitianEigen
{
    RVector values;   ///< ascending
    CMatrix vectors;  ///< column i pairs with values(i)
};

/// Dense Hermitian eigendecomposition with deterministic gauge: each
/// eigenvector has its largest-magnitude component real positive, and
/// eigenvectors of (numerically) equal eigenvalues are ordered by the index
/// of that component.
[[nodiscard]] inline HermitianEigen hermitian_eigendecomposition(const CMatrix& M, double herm_tol = 1e-12,
                                                                double degeneracy_tol = 1e-10)
{
    if (M.rows() != M.cols())
        throw invalid_input("hermitian_eigendecomposition: matrix is not square");
    if (!M.allFinite())
        throw invalid_input("hermitian_eigendecomposition: non-finite entries");
    if (hermiticity_defect(M) > herm_tol)
        throw invalid_input("hermitian_eigendecomposition: matrix is not Hermitian within tolerance");
    const Eigen::Index n = M.rows();
    HermitianEigen out;
    if (n == 0)
        return out;

    const CMatrix H = 0.5 * (M + M.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
    if (es.info() != Eigen::Success)
        throw numerics_error("hermitian_eigendecomposition: eigensolver did not converge");

    RVector vals = es.eigenvalues();
    CMatrix vecs = es.eigenvectors();
    std::vector<Eigen::Index> lead(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        CVector col = vecs.col(i);
        lead[i] = fix_phase(col);
        vecs.col(i) = col;
    }

    const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    // eigenvalues already ascending; reorder inside degenerate clusters only
    for (Eigen::Index start = 0; start < n;) {
        Eigen::Index stop = start + 1;
        while (stop < n && vals(stop) - vals(stop - 1) <= degeneracy_tol * scale)
            ++stop;
        std::stable_sort(order.begin() + start, order.begin() + stop,
                         [&](Eigen::Index a, Eigen::Index b) { return lead[a] < lead[b]; });
        start = stop;
    }

    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values(i) = vals(order[i]);
        out.vectors.col(i) = vecs.col(order[i]);
    }
    return out;
}

}  // namespace qmeas
