#pragma once

// Finite sub-system x surroundings models and the quantities the preferred
// basis equations are written in: the sub-system eigenbasis, the
// environment components of the state and the four-index h tensor.
//
// Index convention: full index = s * dim_e + e (sub-system index outer).

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qmeas/errors.hpp"
#include "qmeas/numerics/linear_algebra.hpp"

namespace qmeas {

struct CoupledSystem
{
    int dim_s = 0;
    int dim_e = 0;
    CMatrix h_s;    ///< dim_s x dim_s
    CMatrix h_e;    ///< dim_e x dim_e
    CMatrix h_int;  ///< (dim_s*dim_e) square, applied with factor delta
    CVector psi;    ///< unit norm, length dim_s*dim_e
    double delta = 0.0;

    [[nodiscard]] int dim() const noexcept { return dim_s * dim_e; }

    void validate() const
    {
        if (dim_s < 1 || dim_e < 1)
            throw invalid_input("CoupledSystem: dimensions must be positive");
        const Eigen::Index n = dim();
        auto check = [](const CMatrix& m, Eigen::Index size, const char* name) {
            if (m.rows() != size || m.cols() != size)
                throw invalid_input(std::string("CoupledSystem: ") + name + " has wrong shape");
            if (!m.allFinite())
                throw invalid_input(std::string("CoupledSystem: ") + name + " has non-finite entries");
            if (hermiticity_defect(m) > 1e-12)
                throw invalid_input(std::string("CoupledSystem: ") + name + " is not Hermitian");
        };
        check(h_s, dim_s, "h_s");
        check(h_e, dim_e, "h_e");
        check(h_int, n, "h_int");
        if (psi.size() != n)
            throw invalid_input("CoupledSystem: psi has wrong length");
        if (std::abs(psi.norm() - 1.0) > 1e-12)
            throw invalid_input("CoupledSystem: psi is not normalized");
        if (!std::isfinite(delta))
            throw invalid_input("CoupledSystem: delta must be finite");
    }

    /// H_s (x) I + interaction_scale * H_int + I (x) H_e.
    [[nodiscard]] CMatrix hamiltonian(double interaction_scale) const
    {
        return local_part() + interaction_scale * h_int;
    }
    [[nodiscard]] CMatrix hamiltonian() const { return hamiltonian(delta); }

    /// H_s (x) I + I (x) H_e.
    [[nodiscard]] CMatrix local_part() const
    {
        const Eigen::Index n = dim();
        CMatrix h = CMatrix::Zero(n, n);
        for (int s = 0; s < dim_s; ++s)
            for (int t = 0; t < dim_s; ++t)
                for (int e = 0; e < dim_e; ++e)
                    h(s * dim_e + e, t * dim_e + e) += h_s(s, t);
        for (int s = 0; s < dim_s; ++s)
            h.block(s * dim_e, s * dim_e, dim_e, dim_e) += h_e;
        return h;
    }

    /// I (x) H_e alone.
    [[nodiscard]] CMatrix environment_part() const
    {
        const Eigen::Index n = dim();
        CMatrix h = CMatrix::Zero(n, n);
        for (int s = 0; s < dim_s; ++s)
            h.block(s * dim_e, s * dim_e, dim_e, dim_e) = h_e;
        return h;
    }

    /// psi as a dim_s x dim_e matrix, P(s, e) = psi(s * dim_e + e).
    [[nodiscard]] CMatrix psi_matrix() const
    {
        CMatrix p(dim_s, dim_e);
        for (int s = 0; s < dim_s; ++s)
            for (int e = 0; e < dim_e; ++e)
                p(s, e) = psi(s * dim_e + e);
        return p;
    }
};

/// Eigenbasis of H_s together with the environment components of psi.
struct SubsystemBasis
{
    RVector energies;          ///< E_sl, ascending
    CMatrix vectors;           ///< column l is phi_sl
    CMatrix env_components;    ///< column l is <phi_sl|psi>, length dim_e
    RVector env_norms;         ///< C_sl = |<phi_sl|psi>|^2

    /// Gram matrix G_lp = <env_l|env_p>.
    [[nodiscard]] CMatrix gram() const { return env_components.adjoint() * env_components; }
};

[[nodiscard]] inline SubsystemBasis diagonalize_subsystem(const CoupledSystem& sys)
{
    sys.validate();
    const HermitianEigen eig = hermitian_eigendecomposition(sys.h_s);
    SubsystemBasis b;
    b.energies = eig.values;
    b.vectors = eig.vectors;
    // env_l(e) = sum_s conj(phi_l(s)) P(s, e)
    b.env_components = (b.vectors.adjoint() * sys.psi_matrix()).transpose();
    b.env_norms = b.env_components.colwise().squaredNorm().transpose();
    return b;
}

/// Four-index tensor h_lmpq = <env_l| H_mq |env_p>, where H_mq is the
/// surroundings operator <phi_sm|H|phi_sq>.
///
/// Stored as a dim_s^2 x dim_s^2 matrix with row (l, m) and column (p, q);
/// Hermiticity of H makes this matrix Hermitian.
struct HTensor
{
    int dim_s = 0;
    CMatrix entries;
    double step_fraction = 1.0;  ///< n/N the interaction was scaled by

    [[nodiscard]] cplx operator()(int l, int m, int p, int q) const
    {
        return entries(l * dim_s + m, p * dim_s + q);
    }

    /// max |h_lmpq - conj(h_pqlm)|.
    [[nodiscard]] double hermiticity_defect() const
    {
        return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
    }
};

namespace detail {

/// h tensor of an arbitrary full-space operator.
inline CMatrix h_tensor_of(const CMatrix& op, const CoupledSystem& sys, const SubsystemBasis& basis)
{
    const int ds = sys.dim_s, de = sys.dim_e;
    // op in the (phi_s x identity) basis
    CMatrix u = CMatrix::Zero(ds * de, ds * de);
    for (int s = 0; s < ds; ++s)
        for (int l = 0; l < ds; ++l)
            for (int e = 0; e < de; ++e)
                u(s * de + e, l * de + e) = basis.vectors(s, l);
    const CMatrix rotated = u.adjoint() * op * u;
    const CMatrix& env = basis.env_components;

    CMatrix h(ds * ds, ds * ds);
    for (int m = 0; m < ds; ++m)
        for (int q = 0; q < ds; ++q) {
            const CMatrix block_env = env.adjoint() * rotated.block(m * de, q * de, de, de) * env;
            for (int l = 0; l < ds; ++l)
                for (int p = 0; p < ds; ++p)
                    h(l * ds + m, p * ds + q) = block_env(l, p);
        }
    return h;
}

}  // namespace detail

/// h tensor of H^(n) = H_s + (n/N) delta H_int + H_e.
[[nodiscard]] inline HTensor build_h_tensor(const CoupledSystem& sys, const SubsystemBasis& basis, long n,
                                            long N)
{
    if (N < 1 || n < 0 || n > N)
        throw invalid_input("build_h_tensor: need 0 <= n <= N and N >= 1");
    if (basis.vectors.rows() != sys.dim_s || basis.env_components.rows() != sys.dim_e)
        throw invalid_input("build_h_tensor: basis does not match the system dimensions");
    const double frac = static_cast<double>(n) / static_cast<double>(N);
    HTensor t;
    t.dim_s = sys.dim_s;
    t.step_fraction = frac;
    t.entries = detail::h_tensor_of(sys.hamiltonian(frac * sys.delta), sys, basis);
    return t;
}

/// Coefficient-matrix helpers shared by the solvers. Row j of `a` holds the
/// expansion of psi_sj in the phi_sl basis.
namespace detail {

/// u_j(l, m) = a_jl conj(a_jm), flattened as l * ds + m, one column per j.
inline CMatrix left_products(const CMatrix& a)
{
    const Eigen::Index ds = a.rows();
    CMatrix u(ds * ds, ds);
    for (Eigen::Index j = 0; j < ds; ++j)
        for (Eigen::Index l = 0; l < ds; ++l)
            for (Eigen::Index m = 0; m < ds; ++m)
                u(l * ds + m, j) = a(j, l) * std::conj(a(j, m));
    return u;
}

/// z_k(p, q) = conj(a_kp) a_kq, flattened as p * ds + q, one column per k.
inline CMatrix right_products(const CMatrix& a)
{
    const Eigen::Index ds = a.rows();
    CMatrix z(ds * ds, ds);
    for (Eigen::Index k = 0; k < ds; ++k)
        for (Eigen::Index p = 0; p < ds; ++p)
            for (Eigen::Index q = 0; q < ds; ++q)
                z(p * ds + q, k) = std::conj(a(k, p)) * a(k, q);
    return z;
}

/// F_jk = <psi_j|H|psi_k> for the unnormalized projections psi_j.
inline CMatrix pair_elements(const CMatrix& h, const CMatrix& a)
{
    return left_products(a).transpose() * h * right_products(a);
}

/// N_j = <psi_j|psi_j>.
inline RVector projection_norms(const CMatrix& gram, const CMatrix& a)
{
    const Eigen::Index ds = a.rows();
    RVector n(ds);
    for (Eigen::Index j = 0; j < ds; ++j) {
        const CVector row = a.row(j).transpose();
        // <chi_j|chi_j> with chi_j = sum_l conj(a_jl) env_l
        const double chi = std::real((row.transpose() * gram * row.conjugate()).value());
        n(j) = row.squaredNorm() * chi;
    }
    return n;
}

}  // namespace detail

}  // namespace qmeas
