#pragma once

// Independent check for two-level sub-systems: scan the two-angle family of
// orthonormal bases, then Newton-refine every grid minimum of the
// normalized off-diagonal element.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qmeas/eigensolver/continuation.hpp"
#include "qmeas/quantities.hpp"

namespace qmeas {

struct BruteForceOptions
{
    int theta_points = 33;   ///< grid over [0, pi/2]
    int phi_points = 64;     ///< grid over [0, 2 pi)
    int max_newton = 60;
    double zero_tol = 1e-10; ///< normalized off-diagonal below which a point is a solution
    double distinct_tol = 1e-6;
    std::uint64_t seed = 0;  ///< 0: regular grid; otherwise the grid is randomly shifted
};

struct BruteForceResult
{
    PreferredBasisSolution best;        ///< smallest normalized off-diagonal found
    std::vector<CMatrix> zeros;         ///< all distinct solutions found, gauge-fixed
    double min_offdiag = INFINITY;      ///< |<psi_1|H|psi_2>| / ||H|| at `best`
};

namespace detail {

inline CMatrix two_level_basis(double theta, double phi)
{
    const cplx e = std::polar(1.0, phi);
    CMatrix a(2, 2);
    a(0, 0) = std::cos(theta);
    a(0, 1) = e * std::sin(theta);
    a(1, 0) = -std::conj(e) * std::sin(theta);
    a(1, 1) = std::cos(theta);
    return a;
}

/// Normalized <psi_1|H|psi_2> / ||H||; NaN when a projection is unoccupied.
inline cplx normalized_offdiag(const CMatrix& h, const CMatrix& gram, double h_norm, const CMatrix& a)
{
    const CMatrix f = pair_elements(h, a);
    const RVector n = projection_norms(gram, a);
    if (n(0) <= occupation_threshold || n(1) <= occupation_threshold)
        return {NAN, NAN};
    return f(0, 1) / std::sqrt(n(0) * n(1)) / h_norm;
}

}  // namespace detail

[[nodiscard]] inline BruteForceResult brute_force_preferred_basis(const CoupledSystem& sys,
                                                                  const BruteForceOptions& opt = {})
{
    sys.validate();
    if (sys.dim_s != 2)
        throw invalid_input("brute_force_preferred_basis: only two-level sub-systems are supported");
    if (opt.theta_points < 3 || opt.phi_points < 4)
        throw invalid_input("brute_force_preferred_basis: grid too coarse");

    const ContinuationContext ctx(sys, diagonalize_subsystem(sys));
    const CMatrix h = ctx.tensor_at(1.0);
    auto objective = [&](double th, double ph) {
        return detail::normalized_offdiag(h, ctx.gram(), ctx.hamiltonian_norm(), detail::two_level_basis(th, ph));
    };

    double shift_t = 0.0, shift_p = 0.0;
    if (opt.seed != 0) {
        std::mt19937_64 rng(opt.seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        shift_t = u(rng);
        shift_p = u(rng);
    }
    const int nt = opt.theta_points, np = opt.phi_points;
    const double dt = (0.5 * pi) / (nt - 1), dp = 2.0 * pi / np;
    auto theta_at = [&](int i) { return std::min(0.5 * pi, (i + shift_t * (i + 1 < nt ? 1.0 : 0.0)) * dt); };
    auto phi_at = [&](int k) { return (k + shift_p) * dp; };

    RMatrix grid(nt, np);
    for (int i = 0; i < nt; ++i)
        for (int k = 0; k < np; ++k) {
            const cplx v = objective(theta_at(i), phi_at(k));
            grid(i, k) = std::isnan(v.real()) ? INFINITY : std::abs(v);
        }

    BruteForceResult out;
    auto refine = [&](double th, double ph) {
        cplx r = objective(th, ph);
        for (int it = 0; it < opt.max_newton && !std::isnan(r.real()) && std::abs(r) > 1e-15; ++it) {
            const double step = 1e-7;
            const cplx rt = (objective(th + step, ph) - objective(th - step, ph)) / (2.0 * step);
            const cplx rp = (objective(th, ph + step) - objective(th, ph - step)) / (2.0 * step);
            RMatrix J(2, 2);
            J << rt.real(), rp.real(), rt.imag(), rp.imag();
            const RVector dx = least_norm_solve(J, RVector((RVector(2) << -r.real(), -r.imag()).finished()));
            // backtracking keeps |r| decreasing
            double lambda = 1.0;
            bool moved = false;
            for (int b = 0; b < 30; ++b, lambda *= 0.5) {
                const cplx trial = objective(th + lambda * dx(0), ph + lambda * dx(1));
                if (!std::isnan(trial.real()) && std::abs(trial) < std::abs(r)) {
                    th += lambda * dx(0);
                    ph += lambda * dx(1);
                    r = trial;
                    moved = true;
                    break;
                }
            }
            if (!moved)
                break;
        }
        return std::pair<CMatrix, cplx>{detail::two_level_basis(th, ph), r};
    };

    for (int i = 0; i < nt; ++i)
        for (int k = 0; k < np; ++k) {
            const double v = grid(i, k);
            if (!std::isfinite(v))
                continue;
            bool local_min = true;
            for (int di = -1; di <= 1 && local_min; ++di)
                for (int dk = -1; dk <= 1; ++dk) {
                    if ((di == 0 && dk == 0) || i + di < 0 || i + di >= nt)
                        continue;
                    if (grid(i + di, (k + dk + np) % np) < v) {
                        local_min = false;
                        break;
                    }
                }
            if (!local_min)
                continue;
            auto [a, r] = refine(theta_at(i), phi_at(k));
            if (std::isnan(r.real()))
                continue;
            const double mag = std::abs(r);
            detail::apply_phase_gauge(a);
            if (mag < out.min_offdiag) {
                out.min_offdiag = mag;
                out.best.a = a;
            }
            if (mag <= opt.zero_tol) {
                bool seen = false;
                for (const CMatrix& z : out.zeros)
                    seen = seen || aligned_distance(z, a) < opt.distinct_tol;
                if (!seen)
                    out.zeros.push_back(a);
            }
        }

    if (!std::isfinite(out.min_offdiag))
        throw numerics_error("brute_force_preferred_basis: no admissible basis found");

    // canonical row order: the row dominated by phi_s1 first
    auto canonical = [](CMatrix& a) {
        if (std::norm(a(0, 0)) < 0.5)
            a.row(0).swap(a.row(1));
    };
    canonical(out.best.a);
    for (CMatrix& z : out.zeros)
        canonical(z);

    detail::refresh(out.best, h, ctx.gram(), ctx.hamiltonian_norm());
    out.best.steps_used = 0;
    out.best.converged = out.best.residual_offdiag <= opt.zero_tol;
    out.best.O_s = out.best.converged ? observable_spectrum(ctx, out.best).O_s : RVector::Zero(2);
    return out;
}

}  // namespace qmeas
