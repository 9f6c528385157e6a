#pragma once

// End-to-end estimate for a 50 keV electron stopping in a ZnS phosphor:
// energy bookkeeping along the electron packet, the photon budget, emission
// and absorption rates, and the resulting photon sphere and yield.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qmeas/check.hpp"
#include "qmeas/errors.hpp"
#include "qmeas/numerics/quadrature.hpp"
#include "qmeas/quantities.hpp"
#include "qmeas/rates.hpp"

namespace qmeas {

struct ScenarioConfig
{
    double beam_energy = 50e3;     ///< eV
    double packet_length = 1e-6;   ///< m
    /// eV/m. Unset: beam_energy / max_depth, so the packet end stops exactly
    /// at the maximum depth.
    std::optional<double> loss_rate;
    double max_depth = 6e-6;       ///< m
    double extra_travel = 0.5e-6;  ///< m
    double photon_energy = 5.8;    ///< eV
    double wavefront_energy_above_Ec = 1.1;  ///< eV
    MaterialParams material = zinc_sulfide();
    double n_k = 5.0;
    std::optional<double> fixed_bk;  ///< unset: maximize the rate factor
    bool sqrt_epsr_mode = false;
    double P_Vs = 1.0;  ///< probability in bound conduction states, informational rows only

    [[nodiscard]] double effective_loss_rate() const { return loss_rate.value_or(beam_energy / max_depth); }

    void validate() const
    {
        auto positive = [](double v, const char* field) {
            if (!(v > 0.0) || !std::isfinite(v))
                throw invalid_input(std::string("ScenarioConfig: ") + field + " must be positive");
        };
        positive(beam_energy, "beam_energy");
        positive(packet_length, "packet_length");
        positive(max_depth, "max_depth");
        positive(photon_energy, "photon_energy");
        positive(wavefront_energy_above_Ec, "wavefront_energy_above_Ec");
        positive(n_k, "n_k");
        if (!(extra_travel >= 0.0))
            throw invalid_input("ScenarioConfig: extra_travel must be >= 0");
        if (loss_rate && !(*loss_rate >= 0.0))
            throw invalid_input("ScenarioConfig: loss_rate must be >= 0");
        if (packet_length > max_depth)
            throw invalid_input("ScenarioConfig: packet_length must not exceed max_depth");
        if (fixed_bk)
            positive(*fixed_bk, "fixed_bk");
        if (!(P_Vs >= 0.0 && P_Vs <= 1.0))
            throw invalid_input("ScenarioConfig: P_Vs must lie in [0, 1]");
        material.validate();
    }
};

struct ScenarioReport
{
    double packet_energy_at_front_arrival = 0.0;     ///< eV
    double packet_energy_after_extra_travel = 0.0;   ///< eV
    double traversal_time = 0.0;                     ///< s
    long n_ph = 0;
    double b_k = 0.0;
    double kappa_down = 0.0;                         ///< 1/s, path selected by sqrt_epsr_mode
    double kappa_down_alternate = 0.0;               ///< 1/s, the other path
    double emission_lifetime = 0.0;                  ///< s
    double photon_sphere_radius = 0.0;               ///< m
    double kappa_up = 0.0;                           ///< 1/s
    double absorption_lifetime = 0.0;                ///< s
    double photon_travel_distance = 0.0;             ///< m
    long normalized_photon_yield_lower_bound = 0;
    double measured_reference = 500.0;
    std::vector<CheckRow> checks;

    [[nodiscard]] bool all_passed() const
    {
        for (const auto& c : checks)
            if (!c.passed())
                return false;
        return true;
    }
};

/// Carries whatever part of the report was computed before the failure.
class scenario_failure : public error
{
public:
    scenario_failure(const std::string& what, ScenarioReport partial) : error(what), partial_(std::move(partial)) {}
    [[nodiscard]] const ScenarioReport& partial() const noexcept { return partial_; }

private:
    ScenarioReport partial_;
};

namespace detail {

/// Kinetic energy (eV) of the electron at a given depth under a constant
/// loss rate, zero once exhausted.
inline double energy_at_depth(double depth, const ScenarioConfig& cfg)
{
    return std::max(0.0, cfg.beam_energy - cfg.effective_loss_rate() * std::max(0.0, depth));
}

}  // namespace detail

/// Packet energy with its front at the given depth. Energy is spread
/// linearly between the front and the end of the packet, so the packet
/// carries the mean of the two endpoint energies.
[[nodiscard]] inline Energy packet_energy_at(double depth_of_front, const ScenarioConfig& cfg)
{
    cfg.validate();
    if (!(depth_of_front >= 0.0) || depth_of_front > (cfg.max_depth + cfg.extra_travel) * (1.0 + 1e-12))
        throw invalid_input("packet_energy_at: depth outside [0, max_depth + extra_travel]");
    const double front = detail::energy_at_depth(depth_of_front, cfg);
    const double end = detail::energy_at_depth(depth_of_front - cfg.packet_length, cfg);
    return Energy::ev(0.5 * (front + end));
}

/// Time for the packet end to cover extra_travel after the front has reached
/// max_depth, with the end slowing as it loses energy. `speed` maps kinetic
/// energy to m/s.
[[nodiscard]] inline double traversal_time(const ScenarioConfig& cfg, const std::function<double(Energy)>& speed)
{
    cfg.validate();
    if (cfg.extra_travel == 0.0)
        return 0.0;
    const double start = cfg.max_depth - cfg.packet_length;
    auto inverse_speed = [&](double s) {
        const double v = speed(Energy::ev(detail::energy_at_depth(s, cfg)));
        if (!(v > 0.0))
            throw numerics_error("traversal_time: packet end comes to rest inside the travel span");
        return 1.0 / v;
    };
    return integrate(inverse_speed, start, start + cfg.extra_travel, {1e-12, 0.0, 100000}).value;
}

[[nodiscard]] inline double traversal_time(const ScenarioConfig& cfg, const PhysicalConstants& k = codata2018())
{
    return traversal_time(cfg, [&](Energy e) { return electron_speed(e, k); });
}

/// Number of whole photons the energy can pay for.
[[nodiscard]] inline long photon_budget(Energy total_energy, Energy photon_energy)
{
    const double t = total_energy.in_joules(), p = photon_energy.in_joules();
    if (!(t > 0.0) || !(p > 0.0))
        throw invalid_input("photon_budget: energies must be positive");
    return static_cast<long>(std::floor(t / p));
}

[[nodiscard]] inline ScenarioReport run_scenario(const ScenarioConfig& cfg, const PhysicalConstants& k = codata2018())
{
    cfg.validate();
    ScenarioReport r;
    auto& rows = r.checks;
    const std::string bk_source = cfg.fixed_bk ? "fixed" : "optimized";
    try {
        r.packet_energy_at_front_arrival = packet_energy_at(cfg.max_depth, cfg).in_ev();
        r.packet_energy_after_extra_travel = packet_energy_at(cfg.max_depth + cfg.extra_travel, cfg).in_ev();
        r.traversal_time = traversal_time(cfg, k);
        rows.push_back(relative_check("energy.front_arrival", "packet energy with the front at maximum depth (eV)",
                                      r.packet_energy_at_front_arrival, 4167.0, 0.01));
        rows.push_back(relative_check("energy.after_travel", "packet energy after the extra travel (eV)",
                                      r.packet_energy_after_extra_travel, 2083.0, 0.01));
        rows.push_back(relative_check("energy.traversal_time", "time for the packet end to cover the extra travel (fs)",
                                      r.traversal_time * 1e15, 12.6, 0.25,
                                      "kinematics behind the reference value are not stated; relativistic speed "
                                      "along a linear energy profile is used"));

        r.n_ph = photon_budget(Energy::ev(r.packet_energy_after_extra_travel), Energy::ev(cfg.photon_energy));
        rows.push_back(absolute_check("photons.count", "photons emitted in one transition", double(r.n_ph), 359.0, 0.0));
        if (r.n_ph < 1)
            throw invalid_input("run_scenario: packet energy cannot pay for a single photon");

        r.b_k = cfg.fixed_bk.value_or(optimal_bk());
        rows.push_back(absolute_check("subsystem.b_k", "sub-system radius multiplier (" + bk_source + ")", r.b_k, 2.32,
                                      0.01));

        TransitionInputs in;
        in.omega_if = angular_frequency(ev_to_joule(cfg.photon_energy), k);
        in.geometry.b_k = r.b_k;
        in.geometry.eps_r = cfg.material.eps_r;
        in.n_k = cfg.n_k;
        in.n_ph = static_cast<int>(r.n_ph);
        in.material = cfg.material;

        r.kappa_down = kappa_down(in, cfg.sqrt_epsr_mode, k);
        r.kappa_down_alternate = kappa_down(in, !cfg.sqrt_epsr_mode, k);
        r.emission_lifetime = 1.0 / r.kappa_down;
        // the emission rate does not depend on tau, so the lifetime closes the chain directly
        in.geometry.tau = r.emission_lifetime;
        r.photon_sphere_radius = in.geometry.radius(k);
        rows.push_back(relative_check("emission.kappa_down", "emission rate (1/s)", r.kappa_down, 3.56e14, 0.05));
        rows.push_back(info_row("emission.kappa_down_alternate",
                                std::string("emission rate with the sqrt(eps_r) factor ") +
                                    (cfg.sqrt_epsr_mode ? "removed" : "applied") + " (1/s)",
                                r.kappa_down_alternate, cfg.sqrt_epsr_mode ? 3.56e14 : 8.0e14,
                                "the general rate formula carries sqrt(eps_r) but the reference value matches only "
                                "without it"));
        rows.push_back(relative_check("emission.lifetime", "emission lifetime (fs)", r.emission_lifetime * 1e15, 2.8,
                                      0.05));
        rows.push_back(relative_check("emission.radius", "photon sphere radius (um)", r.photon_sphere_radius * 1e6,
                                      1.7, 0.05));

        r.kappa_up = kappa_up(in, k);
        r.absorption_lifetime = 1.0 / r.kappa_up;
        r.photon_travel_distance = in.geometry.light_speed(k) * r.absorption_lifetime;
        rows.push_back(relative_check("absorption.kappa_up", "absorption rate (1/s)", r.kappa_up, 9.5e14, 0.05));
        rows.push_back(relative_check("absorption.lifetime", "absorption lifetime (fs)", r.absorption_lifetime * 1e15,
                                      1.1, 0.10));
        rows.push_back(relative_check("absorption.travel", "photon travel distance before absorption (um)",
                                      r.photon_travel_distance * 1e6, 0.15, 0.10));

        // half the electrons transition in the first round; later rounds only add photons
        r.normalized_photon_yield_lower_bound = (r.n_ph + 1) / 2;
        rows.push_back(minimum_check("yield.lower_bound", "photons per detected electron, lower bound",
                                     double(r.normalized_photon_yield_lower_bound), 179.0));
        rows.push_back(info_row("yield.vs_measured", "lower bound scaled by P_Vs against the measured average",
                                cfg.P_Vs * double(r.normalized_photon_yield_lower_bound), r.measured_reference,
                                "the comparison has no quantitative acceptance criterion"));
        rows.push_back(info_row("photons.band_model_energy",
                                "photon energy from the gap and twice the wavefront energy above Ec (eV)",
                                cfg.material.band_gap.in_ev() + 2.0 * cfg.wavefront_energy_above_Ec,
                                cfg.photon_energy));
    } catch (const std::exception& e) {
        throw scenario_failure(std::string("run_scenario: ") + e.what(), r);
    }
    return r;
}

}  // namespace qmeas
