#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>

#include "qmeas/errors.hpp"

namespace qmeas {

/// Thrown when no root could be certified. Carries the best estimate seen.
class root_failure : public numerics_error
{
public:
    root_failure(const std::string& what, double best_estimate, double residual)
        : numerics_error(what), best_(best_estimate), residual_(residual)
    {
    }
    [[nodiscard]] double best_estimate() const noexcept { return best_; }
    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double best_;
    double residual_;
};

/// A scalar equation f(x) = 0 with a sign-changing bracket.
struct RootProblem
{
    std::function<double(double)> f;
    double lo = 0.0;
    double hi = 1.0;
    double tol = 1e-10;          ///< absolute tolerance on the root location
    std::size_t max_iter = 200;
};

/// Bracketed root finding: bisection safeguarded secant steps.
///
/// Every iterate stays inside the current bracket, and the bracket at least
/// halves every second iteration, so convergence is guaranteed for any
/// continuous f with a sign change.
[[nodiscard]] inline double find_root(const RootProblem& p)
{
    if (!p.f)
        throw invalid_input("find_root: no function supplied");
    if (!(p.tol > 0.0))
        throw invalid_input("find_root: tolerance must be positive");

    double a = p.lo, b = p.hi;
    if (a > b)
        std::swap(a, b);
    double fa = p.f(a), fb = p.f(b);
    if (fa == 0.0)
        return a;
    if (fb == 0.0)
        return b;
    if (!(fa * fb < 0.0) || !std::isfinite(fa) || !std::isfinite(fb)) {
        const double best = std::abs(fa) < std::abs(fb) ? a : b;
        throw root_failure("find_root: bracket [" + std::to_string(a) + ", " + std::to_string(b) +
                               "] does not enclose a sign change",
                           best, std::min(std::abs(fa), std::abs(fb)));
    }

    double width_before = b - a;
    for (std::size_t it = 0; it < p.max_iter; ++it) {
        if (b - a <= 2.0 * p.tol) {
            // Return the endpoint-weighted point inside the final bracket.
            const double x = std::abs(fa) < std::abs(fb) ? a : b;
            return std::abs(x - 0.5 * (a + b)) <= p.tol ? x : 0.5 * (a + b);
        }

        double x = b - fb * (b - a) / (fb - fa);
        const double mid = 0.5 * (a + b);
        // fall back to bisection when the secant point leaves the bracket,
        // hugs an endpoint, or the bracket stopped shrinking fast enough
        const bool stalled = (it % 2 == 1) && (b - a) > 0.5 * width_before;
        if (!(x > a && x < b) || stalled)
            x = mid;
        if (it % 2 == 1)
            width_before = b - a;

        // nudge off the endpoints so each iteration removes at least tol/2
        const double nudge = 0.5 * p.tol;
        if (x - a < nudge)
            x = a + nudge;
        if (b - x < nudge)
            x = b - nudge;

        const double fx = p.f(x);
        if (fx == 0.0)
            return x;
        if (!std::isfinite(fx))
            throw root_failure("find_root: function returned a non-finite value", x, fx);
        if ((fx < 0.0) == (fa < 0.0)) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    const double best = std::abs(fa) < std::abs(fb) ? a : b;
    throw root_failure("find_root: iteration budget exhausted", best, std::min(std::abs(fa), std::abs(fb)));
}

}  // namespace qmeas
