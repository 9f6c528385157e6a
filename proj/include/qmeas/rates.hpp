#pragma once

// Transition rates for a photon packet interacting with band electrons of a
// finite spherical sub-system: golden rule, dipole emission, the lattice-sum
// integral and the bound-state emission/absorption rates built on it.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "qmeas/errors.hpp"
#include "qmeas/numerics/quadrature.hpp"
#include "qmeas/numerics/root_finding.hpp"
#include "qmeas/quantities.hpp"

namespace qmeas {

/// (2 pi / hbar) |M|^2 rho.
[[nodiscard]] inline double golden_rule_rate(double matrix_element_sq, double rho,
                                             const PhysicalConstants& k = codata2018())
{
    if (matrix_element_sq < 0.0 || rho < 0.0)
        throw invalid_input("golden_rule_rate: arguments must be >= 0");
    return 2.0 * pi / k.hbar * matrix_element_sq * rho;
}

/// Spontaneous dipole emission 4 alpha omega^3 <d^2> / (3 c^2).
[[nodiscard]] inline double dipole_spontaneous_rate(double omega, double d_sq,
                                                    const PhysicalConstants& k = codata2018())
{
    if (!(omega > 0.0) || d_sq < 0.0)
        throw invalid_input("dipole_spontaneous_rate: need omega > 0 and d_sq >= 0");
    return 4.0 * k.alpha * omega * omega * omega * d_sq / (3.0 * k.c * k.c);
}

/// ((b+1)^2 + 1)/2 e^{-b}, the finite-sphere correction.
[[nodiscard]] inline double gamma_factor(double b_k)
{
    if (!(b_k > 0.0))
        throw invalid_input("gamma_factor: b_k must be positive");
    return 0.5 * ((b_k + 1.0) * (b_k + 1.0) + 1.0) * std::exp(-b_k);
}

/// Spherical sub-system of radius 2 b_k c tau, shrunk by sqrt(eps_r) in a medium.
struct SubsystemGeometry
{
    double b_k = 2.32;
    double tau = 1e-15;  ///< s
    double eps_r = 1.0;

    void validate() const
    {
        if (!(b_k > 0.0))
            throw invalid_input("SubsystemGeometry: b_k must be positive");
        if (!(tau > 0.0))
            throw invalid_input("SubsystemGeometry: tau must be positive");
        if (!(eps_r >= 1.0))
            throw invalid_input("SubsystemGeometry: eps_r must be >= 1");
    }
    [[nodiscard]] double gamma() const { return gamma_factor(b_k); }
    [[nodiscard]] double light_speed(const PhysicalConstants& k = codata2018()) const
    {
        return k.c / std::sqrt(eps_r);
    }
    [[nodiscard]] double radius(const PhysicalConstants& k = codata2018()) const
    {
        return 2.0 * b_k * light_speed(k) * tau;
    }
    [[nodiscard]] double volume(const PhysicalConstants& k = codata2018()) const
    {
        const double r = radius(k);
        return 4.0 * pi / 3.0 * r * r * r;
    }
    /// Throws unless 1 - gamma > 0.
    void require_gamma_below_one() const
    {
        validate();
        if (!(gamma() < 1.0))
            throw invalid_input("SubsystemGeometry: b_k too small, gamma factor must be < 1");
    }
};

/// Band parameters of a direct-gap semiconductor.
struct MaterialParams
{
    std::string name;
    Energy band_gap = Energy::ev(0.0);
    double eps_r = 1.0;
    double m_e_eff = 0.0;   ///< kg
    double m_h = 0.0;       ///< kg
    double m_eh = 0.0;      ///< kg, reduced pair mass, taken as given
    Energy E_p = Energy::ev(0.0);
    double lattice_const = 0.0;  ///< m
    Energy affinity = Energy::ev(0.0);
    Energy work_function = Energy::ev(0.0);

    [[nodiscard]] double cell_volume() const { return lattice_const * lattice_const * lattice_const; }

    void validate() const
    {
        auto positive = [&](double v, const char* field) {
            if (!(v > 0.0) || !std::isfinite(v))
                throw invalid_input("MaterialParams '" + name + "': " + field + " must be positive");
        };
        positive(band_gap.value, "band_gap");
        positive(eps_r, "eps_r");
        positive(m_e_eff, "m_e_eff");
        positive(m_h, "m_h");
        positive(m_eh, "m_eh");
        positive(E_p.value, "E_p");
        positive(lattice_const, "lattice_const");
        positive(affinity.value, "affinity");
        positive(work_function.value, "work_function");
        if (m_eh > std::min(m_e_eff, m_h) * (1.0 + 1e-12))
            throw invalid_input("MaterialParams '" + name + "': m_eh must not exceed min(m_e_eff, m_h)");
    }
};

/// Zinc sulfide as used for the cathodoluminescence position-measurement
/// estimate. m_h is the heavy-hole value; m_eh is the stated pair mass, not
/// derived from the two band masses.
[[nodiscard]] inline MaterialParams zinc_sulfide(const PhysicalConstants& k = codata2018())
{
    MaterialParams m;
    m.name = "zns";
    m.band_gap = Energy::ev(3.6);
    m.eps_r = 5.1;
    m.m_e_eff = 0.28 * k.m_e;
    m.m_h = 0.86 * k.m_e;
    m.m_eh = 0.182 * k.m_e;
    m.E_p = Energy::ev(20.0);
    m.lattice_const = 5.41e-10;
    m.affinity = Energy::ev(3.8);
    m.work_function = Energy::ev(5.4);
    return m;
}

struct TransitionInputs
{
    double omega_if = 0.0;  ///< rad/s
    double k_prime = 0.0;   ///< lattice-momentum mismatch, 1/m
    SubsystemGeometry geometry;  ///< also carries the lifetime tau
    double n_k = 5.0;
    int n_ph = 1;
    MaterialParams material;

    [[nodiscard]] double tau() const noexcept { return geometry.tau; }

    void validate() const
    {
        if (!(omega_if > 0.0))
            throw invalid_input("TransitionInputs: omega_if must be positive");
        if (!(k_prime >= 0.0))
            throw invalid_input("TransitionInputs: k_prime must be >= 0");
        if (!(n_k >= 1.0))
            throw invalid_input("TransitionInputs: n_k must be >= 1");
        if (n_ph < 1)
            throw invalid_input("TransitionInputs: n_ph must be >= 1");
        geometry.require_gamma_below_one();
        material.validate();
    }
};

namespace detail {

/// (4 alpha omega / c^2) (E_p / 6 m_e), written with m_e c^2 so the
/// energy-over-mass ratio stays in one place.
inline double plane_wave_rate(const TransitionInputs& in, const PhysicalConstants& k)
{
    const double ep_over_6me = in.material.E_p.in_joules() / (6.0 * k.m_e * k.c * k.c) * k.c * k.c;
    return 4.0 * k.alpha * in.omega_if / (k.c * k.c) * ep_over_6me;
}

/// sqrt(2 hbar n_k^3 / (3 eps0 omega)).
inline double packet_amplitude_scale(const TransitionInputs& in, const PhysicalConstants& k)
{
    return std::sqrt(2.0 * k.hbar * in.n_k * in.n_k * in.n_k / (3.0 * k.eps0 * in.omega_if));
}

}  // namespace detail

struct LatticeSumIntegral
{
    double closed_form = 0.0;  ///< |I_A|, 1/m^2 times the amplitude unit
    double numeric = 0.0;
    double numeric_error = 0.0;
};

/// Magnitude of the packet amplitude summed over the cells of the
/// sub-system, (C / V_cell) |int_{ball} exp(i k'.r - |r| / (2 c tau)) d^3r|,
/// in closed form and by spherical quadrature over the finite ball. The
/// decay length uses the geometry's light speed.
[[nodiscard]] inline LatticeSumIntegral lattice_sum_integral(const TransitionInputs& in,
                                                             const PhysicalConstants& k = codata2018(),
                                                             const QuadratureOptions& opts = {1e-10, 0.0, 2000000})
{
    in.validate();
    const double C = detail::packet_amplitude_scale(in, k);
    const double vcell = in.material.cell_volume();
    const double L = 2.0 * in.geometry.light_speed(k) * in.tau();
    const double a = 1.0 / L;
    const double kp = in.k_prime;
    const double bracket = kp * kp + a * a;

    LatticeSumIntegral out;
    out.closed_form = 8.0 * pi * C / vcell * a / (bracket * bracket) * (1.0 - in.geometry.gamma());

    BallDomain dom;
    dom.radius = in.geometry.radius(k);
    for (double m : {1.0, 4.0})
        if (m * L < dom.radius)
            dom.radial_breakpoints.push_back(m * L);
    const auto res = integrate_radial_3d(
        [&](const Vec3& r) { return std::exp(std::complex<double>(-r.norm() * a, kp * r.z())); }, dom, opts,
        Symmetry::azimuthal);
    out.numeric = C / vcell * std::abs(res.value);
    out.numeric_error = C / vcell * res.error;
    return out;
}

/// |I_A(k')| / |I_A(0)| = 1 / (1 + u^2)^2 with u = 2 c tau k'.
[[nodiscard]] inline double lattice_sum_ratio(double u)
{
    const double d = 1.0 + u * u;
    return 1.0 / (d * d);
}

/// Rate between one bound conduction state and one valence state with
/// lattice-momentum mismatch k'.
[[nodiscard]] inline double kappa_if(const TransitionInputs& in, const PhysicalConstants& k = codata2018())
{
    in.validate();
    const double L = 2.0 * k.c * in.tau();
    const double a2 = 1.0 / (L * L);
    const double b = in.geometry.b_k;
    const double g = 1.0 - in.geometry.gamma();
    const double bracket = in.k_prime * in.k_prime + a2;
    const double L8 = std::pow(L, 8);
    const double b6 = std::pow(b, 6);
    return detail::plane_wave_rate(in, k) * 48.0 * in.n_k * in.n_k * in.n_k / (L8 * b6) * g * g /
           (bracket * bracket * bracket * bracket);
}

/// Rate from one bound conduction state summed over all valence final states.
[[nodiscard]] inline double kappa_bound_total(const TransitionInputs& in, const PhysicalConstants& k = codata2018())
{
    in.validate();
    const double b = in.geometry.b_k;
    const double g = 1.0 - in.geometry.gamma();
    return detail::plane_wave_rate(in, k) * in.n_k * in.n_k * in.n_k / (b * b * b) * g * g;
}

struct BoundTotalQuadrature
{
    double value = 0.0;          ///< integral over [0, 20 / (2 c tau)]
    double tail = 0.0;           ///< remainder beyond that cut
    double error = 0.0;
};

/// The same total by quadrature of the final-state density times kappa_if
/// over k'. Free-space volume, consistent with kappa_if.
[[nodiscard]] inline BoundTotalQuadrature kappa_bound_quadrature(const TransitionInputs& in,
                                                                 const PhysicalConstants& k = codata2018(),
                                                                 const QuadratureOptions& opts = {1e-11, 0.0,
                                                                                                  200000})
{
    in.validate();
    const double a = 1.0 / (2.0 * k.c * in.tau());
    const double r = 2.0 * in.geometry.b_k * k.c * in.tau();
    const double vs = 4.0 * pi / 3.0 * r * r * r;
    TransitionInputs probe = in;
    probe.k_prime = 0.0;
    const double peak = kappa_if(probe, k);
    auto density = [&](double kp) {
        const double t = 1.0 + kp * kp / (a * a);
        return kp * kp * vs / (2.0 * pi * pi) * peak / (t * t * t * t);
    };
    const auto head = integrate(density, 0.0, 20.0 * a, opts, {a, 3.0 * a});
    const auto tail = integrate(density, 20.0 * a, INFINITY, opts);
    return {head.value, tail.value, head.error + tail.error};
}

/// Emission rate of the incident electron with n_ph photons in the packet.
/// The general form carries sqrt(eps_r); apply_sqrt_epsr selects it.
[[nodiscard]] inline double kappa_down(const TransitionInputs& in, bool apply_sqrt_epsr,
                                       const PhysicalConstants& k = codata2018())
{
    const double n = in.n_ph;
    const double r = n * n * kappa_bound_total(in, k);
    return apply_sqrt_epsr ? std::sqrt(in.material.eps_r) * r : r;
}

/// E_g + hbar^2 k^2 / (2 m_eh).
[[nodiscard]] inline Energy band_transition_photon_energy(double k_mag, const MaterialParams& m,
                                                          const PhysicalConstants& k = codata2018())
{
    if (!(k_mag >= 0.0))
        throw invalid_input("band_transition_photon_energy: |k| must be >= 0");
    const double kinetic = k.hbar * k.hbar * k_mag * k_mag / (2.0 * m.m_eh);
    return Energy::joules(m.band_gap.in_joules() + kinetic);
}

/// Joint electron-hole density of states per unit volume, 1/(J m^3).
[[nodiscard]] inline double pair_state_density(Energy photon_energy, const MaterialParams& m,
                                               const PhysicalConstants& k = codata2018())
{
    const double excess = photon_energy.in_joules() - m.band_gap.in_joules();
    if (excess < 0.0)
        throw invalid_input("pair_state_density: photon energy below the band gap");
    const double s = 2.0 * m.m_eh / (k.hbar * k.hbar);
    return s * std::sqrt(s) * std::sqrt(excess) / (2.0 * pi * pi);
}

/// Absorption rate of one photon by the valence band.
[[nodiscard]] inline double kappa_up(const TransitionInputs& in, const PhysicalConstants& k = codata2018())
{
    in.validate();
    const double photon = k.hbar * in.omega_if;
    const double excess = photon - in.material.band_gap.in_joules();
    if (!(excess > 0.0))
        throw invalid_input("kappa_up: photon energy must exceed the band gap");
    const double pair_rest = 2.0 * in.material.m_eh * k.c * k.c;
    const double b = in.geometry.b_k;
    const double g = 1.0 - in.geometry.gamma();
    return detail::plane_wave_rate(in, k) / in.material.eps_r * pair_rest * std::sqrt(pair_rest) /
           (2.0 * photon * photon) * std::sqrt(excess) * in.n_k * in.n_k * in.n_k / (b * b * b) * g * g;
}

/// (1 - gamma(b))^2 / b^3, the sub-system factor common to the rates.
[[nodiscard]] inline double subsystem_rate_factor(double b)
{
    const double g = 1.0 - gamma_factor(b);
    return g * g / (b * b * b);
}

/// The two sides of the stationarity condition of subsystem_rate_factor:
/// 2 b^3 e^{-b} and 6 - 3((b+1)^2 + 1) e^{-b}.
[[nodiscard]] inline std::pair<double, double> optimal_bk_sides(double b)
{
    const double e = std::exp(-b);
    return {2.0 * b * b * b * e, 6.0 - 3.0 * ((b + 1.0) * (b + 1.0) + 1.0) * e};
}

/// Radius multiplier that maximizes the rate factor.
[[nodiscard]] inline double optimal_bk()
{
    RootProblem p;
    p.f = [](double b) {
        const auto [lhs, rhs] = optimal_bk_sides(b);
        return lhs - rhs;
    };
    p.lo = 0.5;
    p.hi = 10.0;
    p.tol = 1e-14;
    return find_root(p);
}

/// Evaluates every rate in the original units and again with lengths,
/// times and energies rescaled by the given factors (constants and inputs
/// alike), and returns the largest relative departure of the rescaled rate
/// from rate / time_scale. Zero up to rounding for dimensionally sound
/// formulas.
[[nodiscard]] inline double rates_dimensional_audit(const TransitionInputs& in, double length_scale,
                                                    double time_scale, double energy_scale,
                                                    const PhysicalConstants& k = codata2018())
{
    in.validate();
    const PhysicalConstants ks = k.rescaled(length_scale, time_scale, energy_scale);
    const double mass_scale = energy_scale * time_scale * time_scale / (length_scale * length_scale);
    auto energy = [&](Energy e) { return Energy::joules(e.in_joules() * energy_scale); };

    TransitionInputs s = in;
    s.omega_if = in.omega_if / time_scale;
    s.k_prime = in.k_prime / length_scale;
    s.geometry.tau = in.geometry.tau * time_scale;
    s.material.band_gap = energy(in.material.band_gap);
    s.material.E_p = energy(in.material.E_p);
    s.material.affinity = energy(in.material.affinity);
    s.material.work_function = energy(in.material.work_function);
    s.material.m_e_eff = in.material.m_e_eff * mass_scale;
    s.material.m_h = in.material.m_h * mass_scale;
    s.material.m_eh = in.material.m_eh * mass_scale;
    s.material.lattice_const = in.material.lattice_const * length_scale;

    double worst = 0.0;
    auto compare = [&](double original, double rescaled) {
        worst = std::max(worst, std::abs(rescaled * time_scale / original - 1.0));
    };
    const double m_sq = 1e-40, rho = 1e18, d_sq = 1e-20;
    compare(golden_rule_rate(m_sq, rho, k),
            golden_rule_rate(m_sq * energy_scale * energy_scale, rho / energy_scale, ks));
    compare(dipole_spontaneous_rate(in.omega_if, d_sq, k),
            dipole_spontaneous_rate(s.omega_if, d_sq * length_scale * length_scale, ks));
    compare(kappa_if(in, k), kappa_if(s, ks));
    compare(kappa_bound_total(in, k), kappa_bound_total(s, ks));
    compare(kappa_down(in, false, k), kappa_down(s, false, ks));
    compare(kappa_down(in, true, k), kappa_down(s, true, ks));
    if (k.hbar * in.omega_if > in.material.band_gap.in_joules())
        compare(kappa_up(in, k), kappa_up(s, ks));
    return worst;
}

}  // namespace qmeas
