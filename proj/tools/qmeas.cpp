// qmeas command-line front end.
//
// Exit codes: 0 success, 1 a check or convergence failed, 2 usage or input error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmeas/qmeas.hpp"

namespace {

using qmeas::io::json;

constexpr int exit_ok = 0;
constexpr int exit_check = 1;
constexpr int exit_usage = 2;

std::string sig3(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

void print_rows(const std::vector<qmeas::CheckRow>& rows)
{
    std::printf("%-36s %-10s %-10s %-9s %s\n", "id", "computed", "reference", "tolerance", "status");
    for (const auto& r : rows)
        std::printf("%-36s %-10s %-10s %-9s %s\n", r.id.c_str(), sig3(r.computed).c_str(),
                    sig3(r.reference).c_str(), sig3(r.tolerance).c_str(),
                    std::string(qmeas::to_string(r.status())).c_str());
}

void emit(const json& j, const std::string& out)
{
    if (out.empty())
        std::cout << j.dump(2) << '\n';
    else
        qmeas::io::write_json_file(out, j);
}

// ---------------------------------------------------------------- eigensolve

struct EigensolveArgs
{
    std::string system, out;
    long steps = 1000;
    double ortho_tol = 1e-8, offdiag_tol = 1e-7;
};

int run_eigensolve(const EigensolveArgs& a)
{
    const auto sys = qmeas::io::coupled_system_from_json(qmeas::io::read_json_file(a.system));
    qmeas::ContinuationConfig cfg;
    cfg.n_steps = a.steps;
    cfg.ortho_tol = a.ortho_tol;
    cfg.offdiag_tol = a.offdiag_tol;
    try {
        emit(qmeas::io::to_json(qmeas::solve_preferred_basis(sys, cfg)), a.out);
        return exit_ok;
    } catch (const qmeas::convergence_failure& e) {
        std::cerr << "qmeas: " << e.what() << '\n';
        emit(qmeas::io::to_json(e.solution()), a.out);
        return exit_check;
    }
}

// ---------------------------------------------------------------- hydrogen

struct HydrogenArgs
{
    std::string upper = "2P1/2", lower = "1S1/2";
    double ecm_ev = 100.0;
    bool as_json = false;
};

int run_hydrogen(const HydrogenArgs& a)
{
    const auto r = qmeas::transition_adjustment(qmeas::parse_level(a.upper), qmeas::parse_level(a.lower),
                                                qmeas::Energy::ev(a.ecm_ev));
    if (a.as_json) {
        std::cout << qmeas::io::to_json(r).dump(2) << '\n';
        return exit_ok;
    }
    std::printf("transition %s - %s, E_cm = %s eV\n", r.level_upper.label().c_str(), r.level_lower.label().c_str(),
                sig3(r.cm_energy).c_str());
    std::printf("  %-28s %s eV\n", "Dirac adjustment", sig3(r.adjustment_dirac).c_str());
    std::printf("  %-28s %s eV\n", "finite-mass adjustment", sig3(r.adjustment_new).c_str());
    std::printf("  %-28s %s eV\n", "difference", sig3(r.difference).c_str());
    std::printf("  %-28s %s eV\n", "centre-of-mass contribution", sig3(r.cm_contribution).c_str());
    std::printf("  %-28s %s\n", "coupling ratio", sig3(r.cm_ratio).c_str());
    return exit_ok;
}

// ---------------------------------------------------------------- photon

struct PhotonArgs
{
    std::string packet;
    double energy_ev = 5.8, lifetime_fs = 2.8, n_k = 5.0, eps_r = 1.0;
    std::vector<double> at;
    double t_fs = 0.0;
    bool normalization = false, norm_sq = false, fourier = false;
};

int run_photon(const PhotonArgs& a)
{
    const auto& k = qmeas::codata2018();
    qmeas::PhotonPacket::Params p;
    if (!a.packet.empty()) {
        p = qmeas::io::packet_params_from_json(qmeas::io::read_json_file(a.packet), k);
    } else {
        p.omega_if = qmeas::angular_frequency(qmeas::ev_to_joule(a.energy_ev), k);
        p.tau = a.lifetime_fs * 1e-15;
        p.n_k = a.n_k;
        p.eps_r = a.eps_r;
    }
    const qmeas::PhotonPacket pk(p, k);
    json out = {{"wave_number", pk.wave_number()},
                {"decay_length", pk.decay_length()},
                {"radius", pk.radius()},
                {"quality", pk.quality()},
                {"amplitude_scale", pk.amplitude_scale()}};
    if (!a.at.empty()) {
        if (a.at.size() != 3)
            throw qmeas::invalid_input("--at needs three coordinates");
        const qmeas::Vec3 r(a.at[0], a.at[1], a.at[2]);
        auto vec = [](const qmeas::CVec3& v) {
            json arr = json::array();
            for (int i = 0; i < 3; ++i)
                arr.push_back(json::array({v(i).real(), v(i).imag()}));
            return arr;
        };
        out["amplitude"] = vec(qmeas::packet_amplitude(r, a.t_fs * 1e-15, pk));
        if (a.fourier)
            out["amplitude_fourier"] = vec(qmeas::packet_amplitude_fourier(r, pk));
    }
    if (a.normalization)
        out["lineshape_normalization"] = qmeas::lineshape_normalization(pk).value;
    if (a.norm_sq) {
        const auto n = qmeas::packet_norm_sq_integral(pk);
        out["norm_sq"] = {{"closed_form", n.closed_form}, {"numeric", n.numeric},
                          {"correction_factor", n.correction_factor}};
    }
    std::cout << out.dump(2) << '\n';
    return exit_ok;
}

// ---------------------------------------------------------------- rates

struct RatesArgs
{
    std::string formula, material = "zns";
    double photon_energy_ev = 5.8, tau_fs = 2.8, n_k = 5.0, k_prime = 0.0;
    std::optional<double> b_k;
    int n_ph = 1;
    bool sqrt_epsr = false;
};

int run_rates(const RatesArgs& a)
{
    const auto& k = qmeas::codata2018();
    const auto reg = qmeas::io::default_material_registry();
    qmeas::TransitionInputs in;
    in.omega_if = qmeas::angular_frequency(qmeas::ev_to_joule(a.photon_energy_ev), k);
    in.geometry.tau = a.tau_fs * 1e-15;
    in.geometry.b_k = a.b_k.value_or(qmeas::optimal_bk());
    in.n_k = a.n_k;
    in.n_ph = a.n_ph;
    in.k_prime = a.k_prime;
    in.material = qmeas::io::find_material(reg, a.material);

    json out = {{"formula", a.formula}};
    const std::string& f = a.formula;
    if (f == "optimal-bk") {
        out["value"] = qmeas::optimal_bk();
    } else if (f == "gamma") {
        out["value"] = qmeas::gamma_factor(in.geometry.b_k);
    } else if (f == "kappa-if") {
        out["value"] = qmeas::kappa_if(in, k);
        out["unit"] = "1/s";
    } else if (f == "kappa-bound") {
        out["value"] = qmeas::kappa_bound_total(in, k);
        out["unit"] = "1/s";
    } else if (f == "kappa-down") {
        out["value"] = qmeas::kappa_down(in, a.sqrt_epsr, k);
        out["unit"] = "1/s";
    } else if (f == "kappa-up") {
        out["value"] = qmeas::kappa_up(in, k);
        out["unit"] = "1/s";
    } else if (f == "pair-density") {
        out["value"] = qmeas::pair_state_density(qmeas::Energy::ev(a.photon_energy_ev), in.material, k);
        out["unit"] = "1/(J m^3)";
    } else if (f == "band-energy") {
        out["value"] = qmeas::band_transition_photon_energy(a.k_prime, in.material, k).in_ev();
        out["unit"] = "eV";
    } else if (f == "lattice-sum") {
        const auto r = qmeas::lattice_sum_integral(in, k);
        out["closed_form"] = r.closed_form;
        out["numeric"] = r.numeric;
    } else {
        throw qmeas::invalid_input("unknown formula '" + f + "'");
    }
    std::cout << out.dump(2) << '\n';
    return exit_ok;
}

// ---------------------------------------------------------------- scenario

struct ScenarioArgs
{
    std::string config, out;
    bool as_json = false;
};

int run_scenario_cmd(const ScenarioArgs& a)
{
    qmeas::ScenarioConfig cfg;
    if (!a.config.empty())
        cfg = qmeas::io::scenario_config_from_json(qmeas::io::read_json_file(a.config),
                                                   qmeas::io::default_material_registry());
    qmeas::ScenarioReport r;
    try {
        r = qmeas::run_scenario(cfg);
    } catch (const qmeas::scenario_failure& e) {
        std::cerr << "qmeas: " << e.what() << '\n';
        if (!a.out.empty())
            qmeas::io::write_json_file(a.out, qmeas::io::to_json(e.partial()));
        return exit_check;
    }
    if (!a.out.empty())
        qmeas::io::write_json_file(a.out, qmeas::io::to_json(r));
    if (a.as_json)
        std::cout << qmeas::io::to_json(r).dump(2) << '\n';
    else
        print_rows(r.checks);
    return r.all_passed() ? exit_ok : exit_check;
}

// ---------------------------------------------------------------- repro-report

struct ReproArgs
{
    std::string out;
    double tolerance_scale = 1.0;
};

int run_repro(const ReproArgs& a)
{
    const auto rep = qmeas::run_repro_report(a.tolerance_scale);
    if (!a.out.empty())
        qmeas::io::write_json_file(a.out, qmeas::io::to_json(rep));
    print_rows(rep.rows);
    std::printf("%zu rows, %zu failed\n", rep.rows.size(), rep.failures());
    return rep.all_passed() ? exit_ok : exit_check;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Preferred-basis solver, fine-structure and transition-rate calculators"};
    app.require_subcommand(1);

    EigensolveArgs eig;
    auto* c_eig = app.add_subcommand("eigensolve", "continuation solve of a coupled system");
    c_eig->add_option("--system", eig.system, "system JSON")->required();
    c_eig->add_option("--steps", eig.steps, "continuation steps")->check(CLI::PositiveNumber);
    c_eig->add_option("--out", eig.out, "solution JSON (default stdout)");
    c_eig->add_option("--ortho-tol", eig.ortho_tol);
    c_eig->add_option("--offdiag-tol", eig.offdiag_tol);

    HydrogenArgs hyd;
    auto* c_hyd = app.add_subcommand("hydrogen", "fine-structure adjustments of a transition");
    c_hyd->add_option("--upper", hyd.upper, "upper level, e.g. 2P1/2");
    c_hyd->add_option("--lower", hyd.lower, "lower level, e.g. 1S1/2");
    c_hyd->add_option("--ecm-ev", hyd.ecm_ev, "centre-of-mass kinetic energy (eV)");
    c_hyd->add_flag("--json", hyd.as_json);

    PhotonArgs ph;
    auto* c_ph = app.add_subcommand("photon", "photon packet evaluations");
    c_ph->add_option("--packet", ph.packet, "packet JSON");
    c_ph->add_option("--energy-ev", ph.energy_ev);
    c_ph->add_option("--lifetime-fs", ph.lifetime_fs);
    c_ph->add_option("--n-k", ph.n_k);
    c_ph->add_option("--eps-r", ph.eps_r);
    c_ph->add_option("--at", ph.at, "position x y z (m)")->expected(3);
    c_ph->add_option("--t-fs", ph.t_fs, "time (fs)");
    c_ph->add_flag("--fourier", ph.fourier, "also evaluate the quadrature oracle at --at");
    c_ph->add_flag("--normalization", ph.normalization);
    c_ph->add_flag("--norm-sq", ph.norm_sq);

    RatesArgs rt;
    auto* c_rt = app.add_subcommand("rates", "single rate-formula evaluations");
    c_rt->add_option("--formula", rt.formula,
                     "optimal-bk, gamma, kappa-if, kappa-bound, kappa-down, kappa-up, pair-density, band-energy, "
                     "lattice-sum")
        ->required();
    c_rt->add_option("--material", rt.material);
    c_rt->add_option("--photon-energy-ev", rt.photon_energy_ev);
    c_rt->add_option("--tau-fs", rt.tau_fs);
    c_rt->add_option("--b-k", rt.b_k, "default: optimized");
    c_rt->add_option("--n-k", rt.n_k);
    c_rt->add_option("--n-ph", rt.n_ph);
    c_rt->add_option("--k-prime", rt.k_prime, "1/m");
    c_rt->add_flag("--sqrt-epsr", rt.sqrt_epsr);

    ScenarioArgs sc;
    auto* c_sc = app.add_subcommand("scenario", "run the ZnS position-measurement chain");
    c_sc->add_option("--config", sc.config, "scenario JSON (default: built-in ZnS)");
    c_sc->add_option("--out", sc.out, "report JSON");
    c_sc->add_flag("--json", sc.as_json);

    ReproArgs rp;
    auto* c_rp = app.add_subcommand("repro-report", "recompute every reference number");
    c_rp->add_option("--out", rp.out, "report JSON");
    c_rp->add_option("--tolerance-scale", rp.tolerance_scale)->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*c_eig)
            return run_eigensolve(eig);
        if (*c_hyd)
            return run_hydrogen(hyd);
        if (*c_ph)
            return run_photon(ph);
        if (*c_rt)
            return run_rates(rt);
        if (*c_sc)
            return run_scenario_cmd(sc);
        if (*c_rp)
            return run_repro(rp);
    } catch (const qmeas::invalid_input& e) {
        std::cerr << "qmeas: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "qmeas: " << e.what() << '\n';
        return exit_check;
    }
    return exit_usage;
}
