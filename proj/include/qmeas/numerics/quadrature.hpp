#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature on finite and
// semi-infinite intervals, plus nested spherical-coordinate integration over
// balls. The value type V may be double, std::complex<double> or a dense
// Eigen vector; it only needs +, += and scaling by double.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmeas/errors.hpp"
#include "qmeas/quantities.hpp"

namespace qmeas {

struct QuadratureOptions
{
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    std::size_t max_evals = 500000;

    void validate() const
    {
        if (!(rel_tol > 0.0) && !(abs_tol > 0.0))
            throw invalid_input("quadrature: rel_tol or abs_tol must be positive");
        if (rel_tol < 0.0 || abs_tol < 0.0)
            throw invalid_input("quadrature: tolerances must be non-negative");
        if (max_evals == 0)
            throw invalid_input("quadrature: max_evals must be positive");
    }
};

template <class V>
struct QuadratureResult
{
    V value;
    double error = 0.0;
    std::size_t evals = 0;
};

/// Non-convergence within the evaluation budget; keeps the partial estimate.
template <class V>
class quadrature_failure : public numerics_error
{
public:
    quadrature_failure(const std::string& what, QuadratureResult<V> partial)
        : numerics_error(what), partial_(std::move(partial))
    {
    }
    [[nodiscard]] const QuadratureResult<V>& partial() const noexcept { return partial_; }

private:
    QuadratureResult<V> partial_;
};

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(std::complex<double> v) { return std::abs(v); }
template <class Derived>
double magnitude(const Eigen::MatrixBase<Derived>& v)
{
    return v.norm();
}

// Kronrod abscissae in [0, 1]; odd indices are the 7-point Gauss nodes.
inline constexpr std::array<double, 8> gk_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> gk_wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gk_wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class V>
struct Segment
{
    double a, b;
    V value;
    double error;
    bool at_roundoff = false;  // error already at the rounding floor
    bool tail = false;         // lives in the mapped coordinate of a semi-infinite range
};

template <class V, class F>
Segment<V> gauss_kronrod_15(F& f, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    std::array<V, 15> fv{};
    const V fc = f(center);
    fv[7] = fc;
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(center - half * gk_x[i]);
        fv[14 - i] = f(center + half * gk_x[i]);
    }

    V kronrod = fc * gk_wk[7];
    V gauss = fc * gk_wg[3];
    for (int i = 0; i < 7; ++i) {
        const V pair = fv[i] + fv[14 - i];
        kronrod += pair * gk_wk[i];
        if (i % 2 == 1)
            gauss += pair * gk_wg[i / 2];
    }

    // QUADPACK-style error scaling
    const V mean = kronrod * 0.5;
    double resasc = gk_wk[7] * magnitude(V(fc - mean));
    double resabs = gk_wk[7] * magnitude(fc);
    for (int i = 0; i < 7; ++i) {
        resasc += gk_wk[i] * (magnitude(V(fv[i] - mean)) + magnitude(V(fv[14 - i] - mean)));
        resabs += gk_wk[i] * (magnitude(fv[i]) + magnitude(fv[14 - i]));
    }
    resasc *= std::abs(half);
    resabs *= std::abs(half);

    double err = magnitude(V((kronrod - gauss) * half));
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    bool floor = false;
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        floor = err <= 50.0 * eps * resabs;
        err = std::max(50.0 * eps * resabs, err);
    } else if (err == 0.0) {
        floor = true;
    }

    return {a, b, V(kronrod * half), err, floor, false};
}

template <class V>
struct ByError
{
    bool operator()(const Segment<V>& l, const Segment<V>& r) const { return l.error < r.error; }
};

}  // namespace detail

/// Integrates f over [lo, hi]. `hi` may be +infinity. Interior breakpoints
/// (kinks, peaks, integrable singularities) seed the initial partition.
/// On a semi-infinite range the piece beyond the last breakpoint B is mapped
/// as x = B + s t/(1 - t) with s = B - lo (or 1 without breakpoints), so the
/// breakpoints also set the length scale of the tail.
template <class F>
auto integrate(F f, double lo, double hi, const QuadratureOptions& opts = {},
               std::vector<double> breakpoints = {})
{
    using V = std::decay_t<decltype(f(lo))>;
    opts.validate();
    if (!(hi >= lo) || std::isnan(lo) || std::isinf(lo))
        throw invalid_input("integrate: need finite lo <= hi");
    if (hi == lo)
        return QuadratureResult<V>{V(f(lo) * 0.0), 0.0, 1};

    const bool semi_infinite = std::isinf(hi);
    std::size_t evals = 0;

    std::vector<double> cuts{lo};
    std::sort(breakpoints.begin(), breakpoints.end());
    for (double bp : breakpoints)
        if (bp > cuts.back() && bp < hi)
            cuts.push_back(bp);
    const double tail_base = cuts.back();
    const double tail_scale = tail_base > lo ? tail_base - lo : 1.0;
    if (!semi_infinite)
        cuts.push_back(hi);

    auto plain = [&](double x) -> V {
        ++evals;
        return f(x);
    };
    auto mapped = [&](double t) -> V {
        ++evals;
        const double s = 1.0 - t;
        return V(f(tail_base + tail_scale * t / s) * (tail_scale / (s * s)));
    };
    auto rule = [&](double a, double b, bool tail) {
        auto seg = tail ? detail::gauss_kronrod_15<V>(mapped, a, b) : detail::gauss_kronrod_15<V>(plain, a, b);
        seg.tail = tail;
        return seg;
    };

    std::vector<detail::Segment<V>> heap;
    heap.reserve(64);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        heap.push_back(rule(cuts[i], cuts[i + 1], false));
    if (semi_infinite)
        heap.push_back(rule(0.0, 1.0, true));
    std::make_heap(heap.begin(), heap.end(), detail::ByError<V>{});

    auto totals = [&]() {
        V sum = heap.front().value;
        double err = heap.front().error;
        for (std::size_t i = 1; i < heap.size(); ++i) {
            sum += heap[i].value;
            err += heap[i].error;
        }
        return std::pair<V, double>{sum, err};
    };

    auto [value, error] = totals();
    const double tiny = 100.0 * std::numeric_limits<double>::epsilon();
    while (error > std::max(opts.abs_tol, opts.rel_tol * detail::magnitude(value))) {
        // every remaining error is rounding noise (e.g. a vanishing integral)
        if (heap.front().at_roundoff)
            break;
        if (evals + 30 > opts.max_evals)
            throw quadrature_failure<V>("integrate: evaluation budget exhausted", {value, error, evals});
        std::pop_heap(heap.begin(), heap.end(), detail::ByError<V>{});
        const detail::Segment<V> worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) <= tiny * std::max(std::abs(worst.a), std::abs(worst.b)))
            throw quadrature_failure<V>("integrate: interval cannot be subdivided further",
                                        {value, error, evals});
        heap.push_back(rule(worst.a, mid, worst.tail));
        std::push_heap(heap.begin(), heap.end(), detail::ByError<V>{});
        heap.push_back(rule(mid, worst.b, worst.tail));
        std::push_heap(heap.begin(), heap.end(), detail::ByError<V>{});
        std::tie(value, error) = totals();
    }
    return QuadratureResult<V>{value, error, evals};
}

// --------------------------------------------------------------------------
// Spherical coordinates.

using Vec3 = Eigen::Vector3d;

/// Ball (or all of R^3 with radius = +inf) described in spherical
/// coordinates around `center`, polar axis `axis`.
struct BallDomain
{
    Vec3 center = Vec3::Zero();
    Vec3 axis = Vec3::UnitZ();
    double radius = 1.0;
    std::vector<double> radial_breakpoints;
    std::vector<double> polar_breakpoints;  ///< in u = cos(theta)
};

enum class Symmetry { none, azimuthal };

/// Integrates r^2 g(r, u) over r in [0, radius] and u = cos(theta) in [-1, 1].
/// g is expected to already contain the azimuthal integral.
template <class G>
auto integrate_ball_polar(G g, double radius, const QuadratureOptions& opts = {},
                          std::vector<double> radial_breakpoints = {},
                          std::vector<double> polar_breakpoints = {})
{
    using V = std::decay_t<decltype(g(0.0, 0.0))>;
    if (!(radius > 0.0))
        throw invalid_input("integrate_ball_polar: radius must be positive");
    std::size_t evals = 0;
    auto radial = [&](double r) -> V {
        auto inner = integrate([&](double u) -> V { return V(g(r, u)); }, -1.0, 1.0, opts, polar_breakpoints);
        evals += inner.evals;
        return V(inner.value * (r * r));
    };
    auto outer = integrate(radial, 0.0, radius, opts, std::move(radial_breakpoints));
    outer.evals += evals;
    return outer;
}

/// Integrates f(x) over the ball described by `dom`. With Symmetry::azimuthal
/// the integrand is assumed independent of the azimuth about `dom.axis` and is
/// sampled on a single half-plane.
template <class F>
auto integrate_radial_3d(F f, const BallDomain& dom, const QuadratureOptions& opts = {},
                         Symmetry symmetry = Symmetry::none)
{
    using V = std::decay_t<decltype(f(Vec3{}))>;
    const double axis_norm = dom.axis.norm();
    if (!(axis_norm > 0.0))
        throw invalid_input("integrate_radial_3d: polar axis must be non-zero");
    const Vec3 ez = dom.axis / axis_norm;
    // any unit vector orthogonal to ez
    const Vec3 seed = std::abs(ez.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 ex = (seed - seed.dot(ez) * ez).normalized();
    const Vec3 ey = ez.cross(ex);

    auto point = [&](double r, double u, double phi) -> Vec3 {
        const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
        return dom.center + r * (u * ez + s * (std::cos(phi) * ex + std::sin(phi) * ey));
    };

    if (symmetry == Symmetry::azimuthal) {
        auto g = [&](double r, double u) -> V { return V(f(point(r, u, 0.0)) * (2.0 * pi)); };
        return integrate_ball_polar(g, dom.radius, opts, dom.radial_breakpoints, dom.polar_breakpoints);
    }
    std::size_t evals = 0;
    auto g = [&](double r, double u) -> V {
        auto az = integrate([&](double phi) -> V { return V(f(point(r, u, phi))); }, 0.0, 2.0 * pi, opts);
        evals += az.evals;
        return az.value;
    };
    auto res = integrate_ball_polar(g, dom.radius, opts, dom.radial_breakpoints, dom.polar_breakpoints);
    res.evals += evals;
    return res;
}

}  // namespace qmeas
