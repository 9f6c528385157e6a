#pragma once

// Preferred-basis solver. The interaction is switched on in N equal
// increments; at every increment the orthonormality and off-diagonal
// conditions are linearized around the previous solution and the correction
// of least norm is taken.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmeas/eigensolver/coupled_system.hpp"
#include "qmeas/errors.hpp"
#include "qmeas/numerics/linear_algebra.hpp"

namespace qmeas {

/// Below this norm a projection psi_j counts as unoccupied.
inline constexpr double occupation_threshold = 1e-12;

struct ContinuationConfig
{
    long n_steps = 1000;
    double ortho_tol = 1e-8;
    double offdiag_tol = 1e-7;  ///< relative to ||H||_2
    double degenerate_rank_tol = 1e-9;
    /// Extra Newton corrections at the final increment (0 = pure continuation).
    int final_corrections = 0;

    void validate() const
    {
        if (n_steps < 1)
            throw invalid_input("ContinuationConfig: n_steps must be >= 1");
        if (!(ortho_tol > 0.0) || !(offdiag_tol > 0.0) || !(degenerate_rank_tol > 0.0))
            throw invalid_input("ContinuationConfig: tolerances must be positive");
        if (final_corrections < 0)
            throw invalid_input("ContinuationConfig: final_corrections must be >= 0");
    }
};

struct StepDiagnostics
{
    Eigen::Index rank = 0;
    Eigen::Index unknowns = 0;
    double linear_residual = 0.0;
    double correction_norm = 0.0;  ///< max |da_jl|
    bool renormalized = false;
};

struct PreferredBasisSolution
{
    CMatrix a;     ///< row j: coefficients of psi_sj in the phi_sl basis
    RVector E;     ///< system energies E_j
    RVector O_s;   ///< observable eigenvalues (filled by the solver)
    RVector norms; ///< <psi_j|psi_j>
    long steps_used = 0;
    double residual_ortho = 0.0;
    double residual_offdiag = 0.0;
    int renormalizations = 0;
    bool converged = false;
    StepDiagnostics last_step;

    [[nodiscard]] bool occupied(Eigen::Index j) const { return norms(j) > occupation_threshold; }
};

/// The solver could not bring the residuals below tolerance. Carries the
/// final state so callers can inspect it or retry with more steps.
class convergence_failure : public numerics_error
{
public:
    convergence_failure(const std::string& what, PreferredBasisSolution sol)
        : numerics_error(what), solution_(std::move(sol))
    {
    }
    [[nodiscard]] const PreferredBasisSolution& solution() const noexcept { return solution_; }

private:
    PreferredBasisSolution solution_;
};

/// A single linearized increment could not be solved.
class step_failure : public numerics_error
{
public:
    step_failure(const std::string& what, StepDiagnostics diag) : numerics_error(what), diag_(diag) {}
    [[nodiscard]] const StepDiagnostics& diagnostics() const noexcept { return diag_; }

private:
    StepDiagnostics diag_;
};

/// Precomputed pieces for one system: h tensors of the local and the
/// interaction parts, the environment Gram matrix and ||H||_2.
class ContinuationContext
{
public:
    ContinuationContext(const CoupledSystem& sys, SubsystemBasis basis) : sys_(&sys), basis_(std::move(basis))
    {
        sys.validate();
        h_local_ = detail::h_tensor_of(sys.local_part(), sys, basis_);
        h_int_ = detail::h_tensor_of(sys.h_int, sys, basis_);
        h_env_ = detail::h_tensor_of(sys.environment_part(), sys, basis_);
        gram_ = basis_.gram();
        const RVector spec = Eigen::SelfAdjointEigenSolver<CMatrix>(sys.hamiltonian(), Eigen::EigenvaluesOnly)
                                 .eigenvalues();
        h_norm_ = std::max(std::abs(spec(0)), std::abs(spec(spec.size() - 1)));
        if (h_norm_ == 0.0)
            h_norm_ = 1.0;
    }

    [[nodiscard]] const CoupledSystem& system() const noexcept { return *sys_; }
    [[nodiscard]] const SubsystemBasis& basis() const noexcept { return basis_; }
    [[nodiscard]] int dim_s() const noexcept { return sys_->dim_s; }
    [[nodiscard]] const CMatrix& gram() const noexcept { return gram_; }
    [[nodiscard]] double hamiltonian_norm() const noexcept { return h_norm_; }

    /// h tensor (as matrix) at fraction n/N of the interaction.
    [[nodiscard]] CMatrix tensor_at(double fraction) const
    {
        return h_local_ + (fraction * sys_->delta) * h_int_;
    }
    [[nodiscard]] const CMatrix& interaction_tensor() const noexcept { return h_int_; }
    [[nodiscard]] const CMatrix& environment_tensor() const noexcept { return h_env_; }

private:
    const CoupledSystem* sys_;
    SubsystemBasis basis_;
    CMatrix h_local_, h_int_, h_env_, gram_;
    double h_norm_ = 1.0;
};

namespace detail {

inline double unitarity_defect(const CMatrix& a)
{
    const Eigen::Index ds = a.rows();
    const double rows = (a * a.adjoint() - CMatrix::Identity(ds, ds)).cwiseAbs().maxCoeff();
    const double cols = (a.adjoint() * a - CMatrix::Identity(ds, ds)).cwiseAbs().maxCoeff();
    return std::max(rows, cols);
}

/// max over occupied j != k of |F_jk| / sqrt(N_j N_k) / ||H||.
inline double offdiag_defect(const CMatrix& f, const RVector& norms, double h_norm)
{
    double worst = 0.0;
    for (Eigen::Index j = 0; j < f.rows(); ++j)
        for (Eigen::Index k = 0; k < f.cols(); ++k) {
            if (j == k || norms(j) <= occupation_threshold || norms(k) <= occupation_threshold)
                continue;
            worst = std::max(worst, std::abs(f(j, k)) / std::sqrt(norms(j) * norms(k)));
        }
    return worst / h_norm;
}

inline RVector energies_from(const CMatrix& f, const RVector& norms)
{
    RVector e = RVector::Zero(f.rows());
    for (Eigen::Index j = 0; j < f.rows(); ++j)
        if (norms(j) > occupation_threshold)
            e(j) = std::real(f(j, j)) / norms(j);
    return e;
}

/// Loewdin orthonormalization a <- (a a^H)^(-1/2) a.
inline CMatrix symmetric_orthonormalize(const CMatrix& a)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> es(a * a.adjoint());
    return es.operatorInverseSqrt() * a;
}

/// Rows of the phase gauge: largest-magnitude entry real positive.
inline void apply_phase_gauge(CMatrix& a)
{
    for (Eigen::Index j = 0; j < a.rows(); ++j) {
        CVector row = a.row(j).transpose();
        fix_phase(row);
        a.row(j) = row.transpose();
    }
}

/// Real Jacobian and residual of the constraint system at coefficient
/// matrix `a` for tensor `h`. Unknowns: Re(da) then Im(da), flattened j*ds+l.
/// Off-diagonal rows are scaled by 1/h_norm.
inline std::pair<RMatrix, RVector> linearize(const CMatrix& h, const CMatrix& a, double h_norm)
{
    const Eigen::Index ds = a.rows();
    const Eigen::Index nu = ds * ds;
    const Eigen::Index n_rows = ds * ds + ds * (ds - 1);
    RMatrix J = RMatrix::Zero(n_rows, 2 * nu);
    RVector R = RVector::Zero(n_rows);

    const CMatrix U = left_products(a);   // columns u_j
    const CMatrix Z = right_products(a);  // columns z_k
    const CMatrix T = h * Z;              // T_k(l, m) = sum_pq h_lmpq conj(a_kp) a_kq
    const CMatrix S = U.transpose() * h;  // S_j(p, q) = sum_lm a_jl conj(a_jm) h_lmpq
    const CMatrix F = S * Z;

    Eigen::Index row = 0;
    auto emit = [&](const CVector& P, const CVector& Q, cplx value, double scale, bool real_only) {
        const CVector c_re = (P + Q) * scale;
        const CVector c_im = cplx(0.0, 1.0) * (P - Q) * scale;
        J.block(row, 0, 1, nu) = c_re.real().transpose();
        J.block(row, nu, 1, nu) = c_im.real().transpose();
        R(row) = std::real(value) * scale;
        ++row;
        if (real_only)
            return;
        J.block(row, 0, 1, nu) = c_re.imag().transpose();
        J.block(row, nu, 1, nu) = c_im.imag().transpose();
        R(row) = std::imag(value) * scale;
        ++row;
    };

    // orthonormality O_jk = sum_l conj(a_jl) a_kl - delta_jk, j <= k
    for (Eigen::Index j = 0; j < ds; ++j)
        for (Eigen::Index k = j; k < ds; ++k) {
            CVector P = CVector::Zero(nu), Q = CVector::Zero(nu);
            cplx value = 0.0;
            for (Eigen::Index l = 0; l < ds; ++l) {
                value += std::conj(a(j, l)) * a(k, l);
                Q(j * ds + l) += a(k, l);
                P(k * ds + l) += std::conj(a(j, l));
            }
            if (j == k)
                value -= 1.0;
            emit(P, Q, value, 1.0, j == k);
        }

    // off-diagonal pair elements F_jk, j < k
    for (Eigen::Index j = 0; j < ds; ++j)
        for (Eigen::Index k = j + 1; k < ds; ++k) {
            CVector P = CVector::Zero(nu), Q = CVector::Zero(nu);
            for (Eigen::Index l = 0; l < ds; ++l)
                for (Eigen::Index m = 0; m < ds; ++m) {
                    const cplx t = T(l * ds + m, k);
                    P(j * ds + l) += std::conj(a(j, m)) * t;
                    Q(j * ds + m) += a(j, l) * t;
                }
            for (Eigen::Index p = 0; p < ds; ++p)
                for (Eigen::Index q = 0; q < ds; ++q) {
                    const cplx s = S(j, p * ds + q);
                    Q(k * ds + p) += s * a(k, q);
                    P(k * ds + q) += s * std::conj(a(k, p));
                }
            emit(P, Q, F(j, k), 1.0 / h_norm, false);
        }
    return {J, R};
}

/// One least-norm Newton correction of `a` for tensor `h`.
inline StepDiagnostics newton_correct(CMatrix& a, const CMatrix& h, double h_norm, double rank_tol)
{
    const Eigen::Index ds = a.rows();
    auto [J, R] = linearize(h, a, h_norm);
    const auto sol = least_norm_solve_detailed<double>(J, RVector(-R), rank_tol);
    StepDiagnostics d;
    d.rank = sol.rank;
    d.unknowns = J.cols();
    d.linear_residual = sol.residual;
    if (!sol.x.allFinite())
        throw step_failure("continuation_step: linear solve produced non-finite correction", d);
    const Eigen::Index nu = ds * ds;
    CMatrix da(ds, ds);
    for (Eigen::Index j = 0; j < ds; ++j)
        for (Eigen::Index l = 0; l < ds; ++l)
            da(j, l) = cplx(sol.x(j * ds + l), sol.x(nu + j * ds + l));
    a += da;
    d.correction_norm = da.cwiseAbs().maxCoeff();
    return d;
}

inline void refresh(PreferredBasisSolution& s, const CMatrix& h, const CMatrix& gram, double h_norm)
{
    const CMatrix f = pair_elements(h, s.a);
    s.norms = projection_norms(gram, s.a);
    s.E = energies_from(f, s.norms);
    s.residual_ortho = unitarity_defect(s.a);
    s.residual_offdiag = offdiag_defect(f, s.norms, h_norm);
}

}  // namespace detail

/// Starting point: psi_sj = phi_sj, E_j = h_jjjj / C_sj (zero when unoccupied).
[[nodiscard]] inline PreferredBasisSolution init_solution(const ContinuationContext& ctx)
{
    const int ds = ctx.dim_s();
    PreferredBasisSolution s;
    s.a = CMatrix::Identity(ds, ds);
    detail::refresh(s, ctx.tensor_at(0.0), ctx.gram(), ctx.hamiltonian_norm());
    s.O_s = RVector::Zero(ds);
    return s;
}

/// Overload taking only the sub-system basis; energies use H_s + H_e.
[[nodiscard]] inline PreferredBasisSolution init_solution(const CoupledSystem& sys, const SubsystemBasis& basis)
{
    return init_solution(ContinuationContext(sys, basis));
}

/// Advances `state` from increment n-1 to increment n of N.
[[nodiscard]] inline PreferredBasisSolution continuation_step(const ContinuationContext& ctx,
                                                              PreferredBasisSolution state, long n, long N,
                                                              const ContinuationConfig& cfg)
{
    if (N < 1 || n < 1 || n > N)
        throw invalid_input("continuation_step: need 1 <= n <= N");
    if (state.a.rows() != ctx.dim_s() || state.a.cols() != ctx.dim_s())
        throw invalid_input("continuation_step: state has wrong dimensions");
    const CMatrix h = ctx.tensor_at(static_cast<double>(n) / static_cast<double>(N));

    StepDiagnostics d = detail::newton_correct(state.a, h, ctx.hamiltonian_norm(), cfg.degenerate_rank_tol);
    const double drift = detail::unitarity_defect(state.a);
    if (drift > 10.0 * cfg.ortho_tol / static_cast<double>(N)) {
        state.a = detail::symmetric_orthonormalize(state.a);
        d.renormalized = true;
        ++state.renormalizations;
    }
    state.last_step = d;
    state.steps_used = n;
    detail::refresh(state, h, ctx.gram(), ctx.hamiltonian_norm());
    return state;
}

[[nodiscard]] inline PreferredBasisSolution continuation_step(const CoupledSystem& sys, const SubsystemBasis& basis,
                                                              PreferredBasisSolution state, long n, long N,
                                                              const ContinuationConfig& cfg)
{
    return continuation_step(ContinuationContext(sys, basis), std::move(state), n, N, cfg);
}

/// Recomputes (residual_ortho, residual_offdiag) for `sol` at the full interaction.
[[nodiscard]] inline std::pair<double, double> solution_residuals(const ContinuationContext& ctx,
                                                                  const PreferredBasisSolution& sol)
{
    if (sol.a.rows() != ctx.dim_s() || sol.a.cols() != ctx.dim_s())
        throw invalid_input("solution_residuals: dimension mismatch");
    const CMatrix f = detail::pair_elements(ctx.tensor_at(1.0), sol.a);
    const RVector norms = detail::projection_norms(ctx.gram(), sol.a);
    return {detail::unitarity_defect(sol.a), detail::offdiag_defect(f, norms, ctx.hamiltonian_norm())};
}

[[nodiscard]] inline std::pair<double, double> solution_residuals(const CoupledSystem& sys,
                                                                  const SubsystemBasis& basis,
                                                                  const PreferredBasisSolution& sol)
{
    return solution_residuals(ContinuationContext(sys, basis), sol);
}

struct ObservableSpectrum
{
    RVector O_s;                  ///< E_j - <psi_j|I (x) H_e|psi_j> / N_j
    CMatrix effective_interaction;  ///< <psi_j|delta H_int|psi_k>, normalized projections
};

[[nodiscard]] inline ObservableSpectrum observable_spectrum(const ContinuationContext& ctx,
                                                            const PreferredBasisSolution& sol)
{
    if (!sol.converged)
        throw invalid_input("observable_spectrum: solution is not converged");
    const Eigen::Index ds = ctx.dim_s();
    const CMatrix f_env = detail::pair_elements(ctx.environment_tensor(), sol.a);
    const CMatrix f_int = detail::pair_elements(ctx.interaction_tensor(), sol.a) * ctx.system().delta;
    const RVector norms = detail::projection_norms(ctx.gram(), sol.a);
    ObservableSpectrum out;
    out.O_s = RVector::Zero(ds);
    out.effective_interaction = CMatrix::Zero(ds, ds);
    for (Eigen::Index j = 0; j < ds; ++j) {
        if (norms(j) <= occupation_threshold)
            continue;
        out.O_s(j) = sol.E(j) - std::real(f_env(j, j)) / norms(j);
        for (Eigen::Index k = 0; k < ds; ++k)
            if (norms(k) > occupation_threshold)
                out.effective_interaction(j, k) = f_int(j, k) / std::sqrt(norms(j) * norms(k));
    }
    return out;
}

[[nodiscard]] inline ObservableSpectrum observable_spectrum(const CoupledSystem& sys, const SubsystemBasis& basis,
                                                            const PreferredBasisSolution& sol)
{
    return observable_spectrum(ContinuationContext(sys, basis), sol);
}

/// Full continuation from the H_s eigenbasis to the complete interaction.
[[nodiscard]] inline PreferredBasisSolution solve_preferred_basis(const CoupledSystem& sys,
                                                                  const ContinuationConfig& cfg)
{
    cfg.validate();
    const ContinuationContext ctx(sys, diagonalize_subsystem(sys));
    PreferredBasisSolution s = init_solution(ctx);
    if (sys.delta != 0.0) {
        for (long n = 1; n <= cfg.n_steps; ++n)
            s = continuation_step(ctx, std::move(s), n, cfg.n_steps, cfg);
        const CMatrix h = ctx.tensor_at(1.0);
        for (int i = 0; i < cfg.final_corrections; ++i) {
            s.last_step = detail::newton_correct(s.a, h, ctx.hamiltonian_norm(), cfg.degenerate_rank_tol);
            detail::refresh(s, h, ctx.gram(), ctx.hamiltonian_norm());
        }
    }
    s.steps_used = cfg.n_steps;
    detail::apply_phase_gauge(s.a);
    detail::refresh(s, ctx.tensor_at(1.0), ctx.gram(), ctx.hamiltonian_norm());
    s.converged = s.residual_ortho <= cfg.ortho_tol && s.residual_offdiag <= cfg.offdiag_tol;
    if (!s.converged)
        throw convergence_failure("solve_preferred_basis: residuals above tolerance after " +
                                      std::to_string(cfg.n_steps) + " steps (ortho " +
                                      std::to_string(s.residual_ortho) + ", offdiag " +
                                      std::to_string(s.residual_offdiag) + ")",
                                  s);
    s.O_s = observable_spectrum(ctx, s).O_s;
    return s;
}

// --------------------------------------------------------------------------
// First-order perturbation shifts.

struct FirstOrderShifts
{
    RVector O_shift;        ///< <phi_e|<phi_sj| delta H_int |phi_sj>|phi_e>
    RVector E_first_order;  ///< <phi_e|<phi_sj| H |phi_sj>|phi_e>
    bool entangled = false; ///< psi is not a product state; dominant Schmidt pair used
    double schmidt_weight = 1.0;
    CVector env_state;      ///< phi_e
};

[[nodiscard]] inline FirstOrderShifts first_order_shifts(const CoupledSystem& sys, const SubsystemBasis& basis)
{
    sys.validate();
    const int ds = sys.dim_s, de = sys.dim_e;
    Eigen::JacobiSVD<CMatrix> svd(sys.psi_matrix(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    // P = sum_k s_k U_k V_k^H, so the surroundings factor is conj(V_0)
    CVector phi_e = svd.matrixV().col(0).conjugate();
    fix_phase(phi_e);
    const double s0 = svd.singularValues()(0);

    FirstOrderShifts out;
    out.schmidt_weight = s0 * s0;
    out.entangled = out.schmidt_weight < 1.0 - 1e-10;
    out.env_state = phi_e;
    out.O_shift.resize(ds);
    out.E_first_order.resize(ds);
    const double env_energy = std::real(phi_e.dot(sys.h_e * phi_e));
    for (int j = 0; j < ds; ++j) {
        CVector prod(ds * de);
        for (int s = 0; s < ds; ++s)
            for (int e = 0; e < de; ++e)
                prod(s * de + e) = basis.vectors(s, j) * phi_e(e);
        const double coupling = sys.delta * std::real(prod.dot(sys.h_int * prod));
        out.O_shift(j) = coupling;
        out.E_first_order(j) = basis.energies(j) + coupling + env_energy;
    }
    return out;
}

// --------------------------------------------------------------------------
// Comparing bases.

/// Distance between two coefficient matrices modulo row order and row
/// phases: min over permutations of max |a_ref - aligned(a)|.
[[nodiscard]] inline double aligned_distance(const CMatrix& ref, const CMatrix& a)
{
    if (ref.rows() != a.rows() || ref.cols() != a.cols())
        throw invalid_input("aligned_distance: dimension mismatch");
    const Eigen::Index ds = ref.rows();
    std::vector<Eigen::Index> perm(ds);
    std::iota(perm.begin(), perm.end(), 0);
    double best = INFINITY;
    do {
        double worst = 0.0;
        for (Eigen::Index j = 0; j < ds; ++j) {
            const CVector r = ref.row(j).transpose();
            CVector v = a.row(perm[j]).transpose();
            const cplx overlap = v.dot(r);  // <v|r>
            if (std::abs(overlap) > 0.0)
                v *= overlap / std::abs(overlap);
            worst = std::max(worst, (r - v).cwiseAbs().maxCoeff());
        }
        best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace qmeas
