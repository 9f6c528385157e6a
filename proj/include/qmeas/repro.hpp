#pragma once

// Reproduction report: every reference number the library can recompute,
// plus the oracle comparisons backing the closed forms, as check rows.

#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qmeas/check.hpp"
#include "qmeas/hydrogen.hpp"
#include "qmeas/io/json_io.hpp"
#include "qmeas/photon.hpp"
#include "qmeas/quantities.hpp"
#include "qmeas/rates.hpp"
#include "qmeas/scenario.hpp"

namespace qmeas {

inline constexpr std::string_view library_version = "1.0.0";

struct ReproReport
{
    std::vector<CheckRow> rows;
    std::string constants_tag{PhysicalConstants::table_tag};
    std::string timestamp;
    double tolerance_scale = 1.0;

    [[nodiscard]] bool all_passed() const
    {
        for (const auto& r : rows)
            if (!r.passed())
                return false;
        return true;
    }
    [[nodiscard]] std::size_t failures() const
    {
        std::size_t n = 0;
        for (const auto& r : rows)
            n += r.passed() ? 0 : 1;
        return n;
    }
};

[[nodiscard]] inline std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream ss;
    ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return ss.str();
}

namespace detail {

/// The ZnS photon at 5.8 eV with quality factor 2 c tau |k_if| = q.
inline PhotonPacket packet_with_quality(double q, const PhysicalConstants& k)
{
    PhotonPacket::Params p;
    p.omega_if = angular_frequency(ev_to_joule(5.8), k);
    p.tau = q / (2.0 * p.omega_if);
    return PhotonPacket(p, k);
}

inline TransitionInputs zns_inputs(double b_k, const PhysicalConstants& k)
{
    TransitionInputs in;
    in.omega_if = angular_frequency(ev_to_joule(5.8), k);
    in.geometry.b_k = b_k;
    in.geometry.tau = 2.8e-15;
    in.n_k = 5.0;
    in.n_ph = 359;
    in.material = zinc_sulfide(k);
    return in;
}

}  // namespace detail

/// Largest relative difference between the closed-form packet and its
/// Fourier-quadrature oracle at t = 0, over sample points within 4 c tau of
/// the centre.
[[nodiscard]] inline double packet_oracle_max_error(const PhotonPacket& packet)
{
    const double L = packet.decay_length();
    const Vec3 along = packet.k_dir();
    const Vec3 across = packet.pol_dir();
    const Vec3 oblique = (0.6 * across - 0.8 * along).normalized();
    double worst = 0.0;
    for (const Vec3& d : {Vec3(Vec3::Zero()), Vec3(0.5 * L * along), Vec3(L * across), Vec3(L * oblique),
                          Vec3(2.0 * L * across)}) {
        const Vec3 r = packet.center() + d;
        const CVec3 exact = packet_amplitude(r, 0.0, packet);
        const CVec3 oracle = packet_amplitude_fourier(r, packet);
        worst = std::max(worst, (oracle - exact).norm() / exact.norm());
    }
    return worst;
}

[[nodiscard]] inline ReproReport run_repro_report(double tolerance_scale = 1.0,
                                                  const PhysicalConstants& k = codata2018())
{
    if (!(tolerance_scale > 0.0))
        throw invalid_input("run_repro_report: tolerance scale must be positive");
    ReproReport rep;
    rep.tolerance_scale = tolerance_scale;
    rep.timestamp = utc_timestamp();
    auto& rows = rep.rows;

    // a group that throws becomes a failing row instead of aborting the report
    auto guarded = [&](const std::string& id, const std::string& what, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            rows.push_back(absolute_check(id + ".error", what, NAN, 0.0, 0.0, e.what()));
        }
    };

    guarded("bk", "sub-system radius multiplier", [&] {
        const double b = optimal_bk();
        const auto [lhs, rhs] = optimal_bk_sides(b);
        rows.push_back(absolute_check("bk.optimal", "radius multiplier maximizing the rate factor", b, 2.32, 0.01));
        rows.push_back(absolute_check("bk.sides", "relative mismatch of the stationarity condition at the root",
                                      std::abs(lhs - rhs) / std::abs(lhs), 0.0, 1e-8));
    });

    guarded("hydrogen", "2P1/2 - 1S1/2 fine structure", [&] {
        const auto t = transition_adjustment(HydrogenLevel(2, 1, 1), HydrogenLevel(1, 0, 1), Energy::ev(100.0), k);
        rows.push_back(relative_check("hydrogen.dirac", "Dirac fine-structure adjustment (eV)", t.adjustment_dirac,
                                      1.24e-4, 0.01));
        rows.push_back(relative_check("hydrogen.new", "finite-mass fine-structure adjustment (eV)", t.adjustment_new,
                                      1.26e-4, 0.01));
        rows.push_back(relative_check("hydrogen.difference", "finite-mass minus Dirac adjustment (eV)", t.difference,
                                      1.95e-6, 0.08, "difference of nearly equal quantities"));
        rows.push_back(relative_check("hydrogen.cm_contribution", "centre-of-mass contribution at 100 eV (eV)",
                                      t.cm_contribution, 3.3e-6, 0.03));
        rows.push_back(relative_check("hydrogen.cm_ratio", "3 m_p E_cm / (m_t^2 c^2) at 100 eV", t.cm_ratio, 3.2e-7,
                                      0.03));
    });

    guarded("zns", "ZnS position-measurement chain", [&] {
        const ScenarioReport s = run_scenario(ScenarioConfig{}, k);
        for (CheckRow row : s.checks) {
            row.id = "zns." + row.id;
            rows.push_back(std::move(row));
        }
    });

    guarded("lineshape", "momentum line-shape normalization", [&] {
        std::vector<double> deficit;
        double at100 = NAN;
        for (double q : {10.0, 50.0, 100.0, 500.0}) {
            const double n = lineshape_normalization(detail::packet_with_quality(q, k)).value;
            deficit.push_back(std::abs(1.0 - n));
            if (q == 100.0)
                at100 = n;
        }
        bool monotone = true;
        for (std::size_t i = 1; i < deficit.size(); ++i)
            monotone = monotone && deficit[i] < deficit[i - 1];
        rows.push_back(absolute_check("lineshape.normalization_q100",
                                      "normalization of the momentum weight at 2 c tau |k_if| = 100", at100, 1.0,
                                      1e-3, "exact value is (2/pi) atan(2 c tau |k_if|)"));
        rows.push_back(absolute_check("lineshape.monotone", "normalization improves across 10, 50, 100, 500",
                                      monotone ? 1.0 : 0.0, 1.0, 0.0));
    });

    guarded("packet", "localized packet", [&] {
        const PhotonPacket p = detail::packet_with_quality(100.0, k);
        rows.push_back(absolute_check("packet.fourier_oracle",
                                      "closed form vs Fourier quadrature within 4 c tau, 2 c tau |k_if| = 100",
                                      packet_oracle_max_error(p), 0.0, 0.05));
        const Vec3 edge = p.center() + p.radius() * p.pol_dir();
        rows.push_back(maximum_check("packet.edge_ratio", "|A| at the packet edge relative to the centre",
                                     packet_amplitude(edge, 0.0, p).norm() / packet_amplitude(p.center(), 0.0, p).norm(),
                                     0.01));
    });

    guarded("lattice_sum", "lattice-sum integral", [&] {
        rows.push_back(absolute_check("lattice_sum.ratio_u2", "|I_A(k')| / |I_A(0)| at 2 c tau k' = 2",
                                      lattice_sum_ratio(2.0), 0.04, 1e-12));
        for (double b : {8.0, 2.32}) {
            const double tol = b == 8.0 ? 0.02 : 0.10;
            for (double u : {0.0, 1.0, 2.0}) {
                TransitionInputs in = detail::zns_inputs(b, k);
                in.k_prime = u / (2.0 * k.c * in.tau());
                const auto r = lattice_sum_integral(in, k);
                std::ostringstream id, what;
                id << "lattice_sum.b" << b << ".u" << u;
                what << "closed form vs quadrature, b_k = " << b << ", 2 c tau k' = " << u;
                rows.push_back(relative_check(id.str(), what.str(), r.closed_form, r.numeric, tol));
            }
        }
    });

    guarded("rates", "rate consistency", [&] {
        for (double b : {2.32, 5.0, 8.0}) {
            const TransitionInputs in = detail::zns_inputs(b, k);
            const auto q = kappa_bound_quadrature(in, k);
            std::ostringstream id, what;
            id << "rates.bound_total.b" << b;
            what << "closed-form bound total vs quadrature over k', b_k = " << b;
            rows.push_back(relative_check(id.str(), what.str(), kappa_bound_total(in, k), q.value + q.tail, 0.02));
        }
        TransitionInputs in = detail::zns_inputs(optimal_bk(), k);
        const double once = kappa_down(in, false, k);
        in.n_ph *= 2;
        rows.push_back(relative_check("rates.quadratic_nph", "emission rate ratio when n_ph doubles",
                                      kappa_down(in, false, k) / once, 4.0, 1e-12));
        in.n_ph /= 2;
        rows.push_back(absolute_check("rates.unit_audit", "largest departure under rescaled units",
                                      rates_dimensional_audit(in, 10.0, 10.0, 0.1, k), 0.0, 1e-9));
    });

    std::set<std::string> ids;
    for (auto& r : rows) {
        if (!ids.insert(r.id).second)
            throw error("run_repro_report: duplicate row id '" + r.id + "'");
        if (r.kind == CheckKind::relative || r.kind == CheckKind::absolute)
            r.tolerance *= tolerance_scale;
    }
    return rep;
}

namespace io {

/// Rows first so everything but the timestamp is reproducible byte for byte.
[[nodiscard]] inline json to_json(const ReproReport& r)
{
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back(to_json(row));
    std::size_t failed = r.failures();
    return {{"rows", rows},
            {"tolerance_scale", r.tolerance_scale},
            {"summary", {{"rows", r.rows.size()}, {"failed", failed}}},
            {"versions", {{"constants", r.constants_tag}, {"library", std::string(library_version)}}},
            {"timestamp", r.timestamp}};
}

}  // namespace io

}  // namespace qmeas
