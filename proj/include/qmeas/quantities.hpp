#pragma once

// Physical constants (CODATA 2018), energy units and small kinematic helpers.
// Everything inside the library is SI; electronvolts, femtoseconds and
// micrometres only appear at the edges (CLI, JSON, reports).

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "qmeas/errors.hpp"

namespace qmeas {

inline constexpr double pi = std::numbers::pi;

/// Joules per electronvolt (exact since the 2019 SI redefinition).
inline constexpr double joule_per_ev = 1.602176634e-19;

/// Table of constants used by every formula in the library.
///
/// Formulas take the table as a parameter instead of reading globals, so a
/// test can rescale units or change a single constant (e.g. halve alpha, or
/// send the proton mass to infinity) and observe the response.
struct PhysicalConstants
{
    double c = 299792458.0;               ///< speed of light, m/s
    double hbar = 1.054571817e-34;        ///< reduced Planck constant, J s
    double e_charge = 1.602176634e-19;    ///< elementary charge, C
    double m_e = 9.1093837015e-31;        ///< electron mass, kg
    double m_p = 1.67262192369e-27;       ///< proton mass, kg
    double eps0 = 8.8541878128e-12;       ///< vacuum permittivity, F/m
    double alpha = 7.2973525693e-3;       ///< fine-structure constant

    /// Total hydrogen mass m_e + m_p.
    [[nodiscard]] constexpr double m_t() const noexcept { return m_e + m_p; }

    /// Electron-proton reduced mass m_e m_p / m_t.
    [[nodiscard]] constexpr double mu() const noexcept { return m_e * m_p / m_t(); }

    /// alpha recomputed from e, eps0, hbar, c. Equals `alpha` for the shipped table.
    [[nodiscard]] double alpha_from_definition() const noexcept
    {
        return e_charge * e_charge / (4.0 * pi * eps0 * hbar * c);
    }

    /// Same physics expressed in rescaled units: a length L becomes
    /// L * length_scale, a time T becomes T * time_scale and an energy E
    /// becomes E * energy_scale. Charge units are untouched, so alpha is
    /// invariant.
    [[nodiscard]] PhysicalConstants rescaled(double length_scale, double time_scale,
                                             double energy_scale) const noexcept
    {
        PhysicalConstants k = *this;
        const double mass_scale = energy_scale * time_scale * time_scale / (length_scale * length_scale);
        k.c = c * length_scale / time_scale;
        k.hbar = hbar * energy_scale * time_scale;
        k.m_e = m_e * mass_scale;
        k.m_p = m_p * mass_scale;
        k.eps0 = eps0 / (energy_scale * length_scale);
        return k;
    }

    /// Identifier written into reports.
    static constexpr std::string_view table_tag = "CODATA-2018";
};

/// The frozen CODATA 2018 table.
[[nodiscard]] inline const PhysicalConstants& codata2018() noexcept
{
    static const PhysicalConstants table{};
    return table;
}

// --------------------------------------------------------------------------
// Energy values with an explicit unit tag.

enum class EnergyUnit { joule, electronvolt };

[[nodiscard]] inline std::string_view to_string(EnergyUnit u) noexcept
{
    return u == EnergyUnit::joule ? "J" : "eV";
}

/// Parses "J"/"joule" or "eV"/"electronvolt" (case sensitive for the short forms).
[[nodiscard]] inline EnergyUnit parse_energy_unit(std::string_view tag)
{
    if (tag == "J" || tag == "joule")
        return EnergyUnit::joule;
    if (tag == "eV" || tag == "electronvolt")
        return EnergyUnit::electronvolt;
    throw invalid_input("unsupported energy unit '" + std::string(tag) + "'");
}

struct Energy
{
    double value = 0.0;
    EnergyUnit unit = EnergyUnit::joule;

    [[nodiscard]] static constexpr Energy joules(double v) noexcept { return {v, EnergyUnit::joule}; }
    [[nodiscard]] static constexpr Energy ev(double v) noexcept { return {v, EnergyUnit::electronvolt}; }

    [[nodiscard]] constexpr double in_joules() const noexcept
    {
        return unit == EnergyUnit::joule ? value : value * joule_per_ev;
    }
    [[nodiscard]] constexpr double in_ev() const noexcept
    {
        return unit == EnergyUnit::electronvolt ? value : value / joule_per_ev;
    }
};

[[nodiscard]] inline Energy convert_energy(Energy e, EnergyUnit target)
{
    switch (target) {
    case EnergyUnit::joule: return Energy::joules(e.in_joules());
    case EnergyUnit::electronvolt: return Energy::ev(e.in_ev());
    }
    throw invalid_input("unsupported energy unit");
}

/// String-tagged overload used by the CLI and JSON readers.
[[nodiscard]] inline Energy convert_energy(Energy e, std::string_view target_unit)
{
    return convert_energy(e, parse_energy_unit(target_unit));
}

[[nodiscard]] constexpr double ev_to_joule(double ev) noexcept { return ev * joule_per_ev; }
[[nodiscard]] constexpr double joule_to_ev(double j) noexcept { return j / joule_per_ev; }

// --------------------------------------------------------------------------
// Kinematics.

[[nodiscard]] inline double reduced_mass(double m1, double m2)
{
    if (!(m1 > 0.0) || !(m2 > 0.0))
        throw invalid_input("reduced_mass: masses must be positive");
    return m1 * m2 / (m1 + m2);
}

/// Relativistic speed of an electron with kinetic energy `kinetic`.
[[nodiscard]] inline double electron_speed(Energy kinetic, const PhysicalConstants& k = codata2018())
{
    const double ke = kinetic.in_joules();
    if (ke < 0.0 || std::isnan(ke))
        throw invalid_input("electron_speed: kinetic energy must be non-negative");
    const double rest = k.m_e * k.c * k.c;
    const double x = ke / rest;
    // 1 - 1/gamma^2 = x(2 + x)/(1 + x)^2, written without cancellation
    return k.c * std::sqrt(x * (2.0 + x)) / (1.0 + x);
}

/// Photon angular frequency for a photon energy in joules.
[[nodiscard]] inline double angular_frequency(double photon_energy_j, const PhysicalConstants& k = codata2018()) noexcept
{
    return photon_energy_j / k.hbar;
}

}  // namespace qmeas
