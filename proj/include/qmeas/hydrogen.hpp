#pragma once

// Hydrogen levels and fine-structure adjustments: the textbook Dirac
// expansion and the finite-proton-mass model with centre-of-mass coupling.

#include <cctype>
#include <cmath>
#include <string>
#include <string_view>

#include "qmeas/errors.hpp"
#include "qmeas/quantities.hpp"

namespace qmeas {

/// Quantum numbers (n, l, j). j is stored doubled so it stays integral.
class HydrogenLevel
{
public:
    HydrogenLevel(int n, int l, int twice_j) : n_(n), l_(l), twice_j_(twice_j)
    {
        if (n < 1)
            throw invalid_input("HydrogenLevel: n must be >= 1");
        if (l < 0 || l > n - 1)
            throw invalid_input("HydrogenLevel: l must satisfy 0 <= l <= n-1");
        if (l == 0 && twice_j != 1)
            throw invalid_input("HydrogenLevel: j must be 1/2 for l = 0");
        if (l > 0 && twice_j != 2 * l - 1 && twice_j != 2 * l + 1)
            throw invalid_input("HydrogenLevel: j must be l +- 1/2");
    }

    [[nodiscard]] int n() const noexcept { return n_; }
    [[nodiscard]] int l() const noexcept { return l_; }
    [[nodiscard]] double j() const noexcept { return 0.5 * twice_j_; }
    [[nodiscard]] int twice_j() const noexcept { return twice_j_; }

    /// Spectroscopic label such as "2P1/2".
    [[nodiscard]] std::string label() const
    {
        static constexpr std::string_view letters = "SPDFGHIK";
        std::string s = std::to_string(n_);
        s += l_ < static_cast<int>(letters.size()) ? letters[l_] : '?';
        s += std::to_string(twice_j_) + "/2";
        return s;
    }

    friend bool operator==(const HydrogenLevel&, const HydrogenLevel&) = default;

private:
    int n_, l_, twice_j_;
};

/// Parses "<n><L><j>" with L in {S, P, D, F} and j written as "1/2", "3/2", ...
[[nodiscard]] inline HydrogenLevel parse_level(std::string_view token)
{
    static constexpr std::string_view grammar =
        "expected <n><L><j>, n a positive integer, L one of S P D F, j a half-integer like 1/2 (e.g. 2P1/2)";
    auto fail = [&](const std::string& why) {
        return invalid_input("invalid level '" + std::string(token) + "': " + why + "; " + std::string(grammar));
    };
    std::size_t i = 0;
    while (i < token.size() && std::isdigit(static_cast<unsigned char>(token[i])))
        ++i;
    if (i == 0 || i > 3)
        throw fail("missing principal quantum number");
    const int n = std::stoi(std::string(token.substr(0, i)));
    if (i >= token.size())
        throw fail("missing orbital letter");
    static constexpr std::string_view letters = "SPDF";
    const auto pos = letters.find(static_cast<char>(std::toupper(static_cast<unsigned char>(token[i]))));
    if (pos == std::string_view::npos)
        throw fail("unknown orbital letter");
    const int l = static_cast<int>(pos);
    const std::string_view jpart = token.substr(i + 1);
    const auto slash = jpart.find('/');
    if (slash == std::string_view::npos || jpart.substr(slash + 1) != "2" || slash == 0 || slash > 2)
        throw fail("j must be written as k/2");
    for (char c : jpart.substr(0, slash))
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw fail("j must be written as k/2");
    const int twice_j = std::stoi(std::string(jpart.substr(0, slash)));
    try {
        return HydrogenLevel(n, l, twice_j);
    } catch (const invalid_input& e) {
        throw fail(e.what());
    }
}

enum class FineStructureKind { dirac, finite_mass };

struct FineStructureModel
{
    FineStructureKind kind = FineStructureKind::dirac;
    Energy cm_energy = Energy::ev(0.0);  ///< centre-of-mass kinetic energy, finite_mass only

    [[nodiscard]] static FineStructureModel dirac() { return {}; }
    [[nodiscard]] static FineStructureModel finite_mass(Energy e_cm)
    {
        if (e_cm.value < 0.0)
            throw invalid_input("FineStructureModel: centre-of-mass energy must be >= 0");
        return {FineStructureKind::finite_mass, e_cm};
    }
};

/// Bohr level -m c^2 alpha^2 / (2 n^2), with m = m_e or the reduced mass.
[[nodiscard]] inline Energy level_energy(int n, bool reduced, const PhysicalConstants& k = codata2018())
{
    if (n < 1)
        throw invalid_input("level_energy: n must be >= 1");
    const double m = reduced ? k.mu() : k.m_e;
    const double e = -m * k.c * k.c * k.alpha * k.alpha / (2.0 * n * n);
    return Energy::ev(joule_to_ev(e));
}

/// 3 m_p E_cm / (m_t^2 c^2).
[[nodiscard]] inline double cm_coupling_ratio(Energy e_cm, const PhysicalConstants& k = codata2018())
{
    if (e_cm.value < 0.0)
        throw invalid_input("cm_coupling_ratio: centre-of-mass energy must be >= 0");
    const double mt = k.m_t();
    return 3.0 * k.m_p * e_cm.in_joules() / (mt * mt * k.c * k.c);
}

namespace detail {

/// 1 - (m_p/m_t)^3 = 3x - 3x^2 + x^3 with x = m_e/m_t, free of cancellation.
inline double recoil_factor(const PhysicalConstants& k)
{
    const double x = k.m_e / k.m_t();
    return x * (3.0 - x * (3.0 - x));
}

}  // namespace detail

[[nodiscard]] inline Energy fine_structure_adjustment(const HydrogenLevel& level, const FineStructureModel& model,
                                                      const PhysicalConstants& k = codata2018())
{
    const int n = level.n();
    const double j = level.j();
    const double a2 = k.alpha * k.alpha;
    const double spin_orbit = 1.0 / (j + 0.5) - 3.0 / (4.0 * n);
    if (model.kind == FineStructureKind::dirac) {
        const double en = level_energy(n, false, k).in_ev();
        return Energy::ev(en * a2 / n * spin_orbit);
    }
    const double emu = level_energy(n, true, k).in_ev();
    const double leading = emu * a2 / n * spin_orbit;
    const double recoil = emu * a2 / n * (1.0 / j - 3.0 / (4.0 * n)) * detail::recoil_factor(k);
    const double cm = cm_coupling_ratio(model.cm_energy, k) * emu;
    return Energy::ev(leading - recoil + cm);
}

struct TransitionReport
{
    HydrogenLevel level_upper;
    HydrogenLevel level_lower;
    double adjustment_dirac = 0.0;  ///< eV
    double adjustment_new = 0.0;    ///< eV
    double difference = 0.0;        ///< eV, adjustment_new - adjustment_dirac
    double cm_contribution = 0.0;   ///< eV
    double cm_ratio = 0.0;
    double cm_energy = 0.0;         ///< eV
};

[[nodiscard]] inline TransitionReport transition_adjustment(const HydrogenLevel& upper, const HydrogenLevel& lower,
                                                            Energy e_cm, const PhysicalConstants& k = codata2018())
{
    const auto dirac = FineStructureModel::dirac();
    const auto fm = FineStructureModel::finite_mass(e_cm);
    TransitionReport r{upper, lower};
    r.adjustment_dirac = fine_structure_adjustment(upper, dirac, k).in_ev() -
                         fine_structure_adjustment(lower, dirac, k).in_ev();
    r.adjustment_new = fine_structure_adjustment(upper, fm, k).in_ev() -
                       fine_structure_adjustment(lower, fm, k).in_ev();
    r.difference = r.adjustment_new - r.adjustment_dirac;
    r.cm_ratio = cm_coupling_ratio(e_cm, k);
    r.cm_contribution =
        r.cm_ratio * (level_energy(upper.n(), true, k).in_ev() - level_energy(lower.n(), true, k).in_ev());
    r.cm_energy = e_cm.in_ev();
    return r;
}

}  // namespace qmeas
