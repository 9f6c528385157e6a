#pragma once

// JSON encoding of systems, solutions, materials, scenario configs and
// reports. Complex numbers are [re, im] pairs; matrices are arrays of rows.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "qmeas/check.hpp"
#include "qmeas/eigensolver/continuation.hpp"
#include "qmeas/errors.hpp"
#include "qmeas/hydrogen.hpp"
#include "qmeas/photon.hpp"
#include "qmeas/rates.hpp"
#include "qmeas/scenario.hpp"

namespace qmeas::io {

using json = nlohmann::json;

/// Parses JSON text, reporting syntax errors as "<source>:<line>:<column>: ...".
[[nodiscard]] inline json parse_json_text(const std::string& text, const std::string& source = "<input>")
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string msg = e.what();
        if (const auto p = msg.find("syntax error"); p != std::string::npos)
            msg = msg.substr(p);
        throw invalid_input(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
    }
}

[[nodiscard]] inline json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw invalid_input("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path.string());
}

inline void write_json_file(const std::filesystem::path& path, const json& j)
{
    std::ofstream out(path);
    if (!out)
        throw invalid_input("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
    if (!out)
        throw error("failed writing '" + path.string() + "'");
}

namespace detail {

inline const json& field(const json& j, const std::string& key, const std::string& where)
{
    if (!j.is_object())
        throw invalid_input(where + ": expected an object");
    const auto it = j.find(key);
    if (it == j.end())
        throw invalid_input(where + ": missing field '" + key + "'");
    return *it;
}

inline double number(const json& j, const std::string& where)
{
    if (!j.is_number())
        throw invalid_input(where + ": expected a number");
    return j.get<double>();
}

inline double number_field(const json& j, const std::string& key, const std::string& where)
{
    return number(field(j, key, where), where + "." + key);
}

inline double number_or(const json& j, const std::string& key, double fallback, const std::string& where)
{
    return j.contains(key) ? number_field(j, key, where) : fallback;
}

inline long integer(const json& j, const std::string& where)
{
    if (!j.is_number_integer())
        throw invalid_input(where + ": expected an integer");
    return j.get<long>();
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where)
{
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known)
            ok = ok || key == k;
        if (!ok)
            throw invalid_input(where + ": unknown field '" + key + "'");
    }
}

inline cplx complex_value(const json& j, const std::string& where)
{
    if (j.is_number())
        return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw invalid_input(where + ": expected a [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline CMatrix complex_matrix(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& where)
{
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
        throw invalid_input(where + ": expected " + std::to_string(rows) + " rows");
    CMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = j[r];
        const std::string rw = where + "[" + std::to_string(r) + "]";
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw invalid_input(rw + ": expected " + std::to_string(cols) + " entries");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = complex_value(row[c], rw + "[" + std::to_string(c) + "]");
    }
    return m;
}

inline json complex_matrix_json(const CMatrix& m)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(complex_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json real_vector_json(const RVector& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v(i));
    return out;
}

inline Vec3 vec3(const json& j, const std::string& where)
{
    if (!j.is_array() || j.size() != 3)
        throw invalid_input(where + ": expected a 3-vector");
    return {number(j[0], where + "[0]"), number(j[1], where + "[1]"), number(j[2], where + "[2]")};
}

}  // namespace detail

// --------------------------------------------------------------------------
// Eigensolver.

[[nodiscard]] inline CoupledSystem coupled_system_from_json(const json& j, const std::string& where = "system")
{
    using namespace detail;
    reject_unknown(j, {"dim_s", "dim_e", "h_s", "h_e", "h_int", "psi", "delta"}, where);
    CoupledSystem s;
    s.dim_s = static_cast<int>(integer(field(j, "dim_s", where), where + ".dim_s"));
    s.dim_e = static_cast<int>(integer(field(j, "dim_e", where), where + ".dim_e"));
    if (s.dim_s < 1 || s.dim_e < 1)
        throw invalid_input(where + ": dimensions must be >= 1");
    const int n = s.dim_s * s.dim_e;
    s.h_s = complex_matrix(field(j, "h_s", where), s.dim_s, s.dim_s, where + ".h_s");
    s.h_e = complex_matrix(field(j, "h_e", where), s.dim_e, s.dim_e, where + ".h_e");
    s.h_int = complex_matrix(field(j, "h_int", where), n, n, where + ".h_int");
    const json& psi = field(j, "psi", where);
    if (!psi.is_array() || static_cast<int>(psi.size()) != n)
        throw invalid_input(where + ".psi: expected " + std::to_string(n) + " entries");
    s.psi.resize(n);
    for (int i = 0; i < n; ++i)
        s.psi(i) = complex_value(psi[i], where + ".psi[" + std::to_string(i) + "]");
    s.delta = number_field(j, "delta", where);
    s.validate();
    return s;
}

[[nodiscard]] inline json to_json(const CoupledSystem& s)
{
    json psi = json::array();
    for (Eigen::Index i = 0; i < s.psi.size(); ++i)
        psi.push_back(detail::complex_json(s.psi(i)));
    return {{"dim_s", s.dim_s},
            {"dim_e", s.dim_e},
            {"h_s", detail::complex_matrix_json(s.h_s)},
            {"h_e", detail::complex_matrix_json(s.h_e)},
            {"h_int", detail::complex_matrix_json(s.h_int)},
            {"psi", psi},
            {"delta", s.delta}};
}

[[nodiscard]] inline json to_json(const PreferredBasisSolution& s)
{
    return {{"a", detail::complex_matrix_json(s.a)},
            {"E", detail::real_vector_json(s.E)},
            {"O_s", detail::real_vector_json(s.O_s)},
            {"norms", detail::real_vector_json(s.norms)},
            {"steps_used", s.steps_used},
            {"residual_ortho", s.residual_ortho},
            {"residual_offdiag", s.residual_offdiag},
            {"renormalizations", s.renormalizations},
            {"converged", s.converged}};
}

// --------------------------------------------------------------------------
// Hydrogen.

[[nodiscard]] inline json to_json(const TransitionReport& r)
{
    return {{"level_upper", r.level_upper.label()},
            {"level_lower", r.level_lower.label()},
            {"adjustment_dirac", r.adjustment_dirac},
            {"adjustment_new", r.adjustment_new},
            {"difference", r.difference},
            {"cm_contribution", r.cm_contribution},
            {"cm_ratio", r.cm_ratio},
            {"cm_energy", r.cm_energy},
            {"unit", "eV"}};
}

// --------------------------------------------------------------------------
// Photon packets: {"photon_energy_ev", "lifetime_fs", "n_k", "k_dir", "pol_dir"}.

[[nodiscard]] inline PhotonPacket::Params packet_params_from_json(const json& j, const PhysicalConstants& k = codata2018(),
                                                                  const std::string& where = "packet")
{
    using namespace detail;
    reject_unknown(j, {"photon_energy_ev", "lifetime_fs", "n_k", "k_dir", "pol_dir", "center_m", "eps_r"}, where);
    PhotonPacket::Params p;
    p.omega_if = angular_frequency(ev_to_joule(number_field(j, "photon_energy_ev", where)), k);
    p.tau = number_field(j, "lifetime_fs", where) * 1e-15;
    p.n_k = number_or(j, "n_k", p.n_k, where);
    if (j.contains("k_dir"))
        p.k_dir = vec3(j["k_dir"], where + ".k_dir");
    if (j.contains("pol_dir"))
        p.pol_dir = vec3(j["pol_dir"], where + ".pol_dir");
    if (j.contains("center_m"))
        p.center = vec3(j["center_m"], where + ".center_m");
    p.eps_r = number_or(j, "eps_r", p.eps_r, where);
    return p;
}

// --------------------------------------------------------------------------
// Materials. Masses are stored in units of the free electron mass.

using MaterialRegistry = std::map<std::string, MaterialParams>;

[[nodiscard]] inline MaterialParams material_from_json(const json& j, const std::string& name,
                                                       const PhysicalConstants& k = codata2018())
{
    using namespace detail;
    const std::string where = "material '" + name + "'";
    reject_unknown(j,
                   {"band_gap_ev", "eps_r", "m_e_eff", "m_h", "m_eh", "E_p_ev", "lattice_const_m", "affinity_ev",
                    "work_function_ev", "mass_unit"},
                   where);
    if (j.contains("mass_unit") && j["mass_unit"] != "m_e")
        throw invalid_input(where + ": mass_unit must be \"m_e\"");
    MaterialParams m;
    m.name = name;
    m.band_gap = Energy::ev(number_field(j, "band_gap_ev", where));
    m.eps_r = number_field(j, "eps_r", where);
    m.m_e_eff = number_field(j, "m_e_eff", where) * k.m_e;
    m.m_h = number_field(j, "m_h", where) * k.m_e;
    m.m_eh = number_field(j, "m_eh", where) * k.m_e;
    m.E_p = Energy::ev(number_field(j, "E_p_ev", where));
    m.lattice_const = number_field(j, "lattice_const_m", where);
    m.affinity = Energy::ev(number_field(j, "affinity_ev", where));
    m.work_function = Energy::ev(number_field(j, "work_function_ev", where));
    m.validate();
    return m;
}

[[nodiscard]] inline json to_json(const MaterialParams& m, const PhysicalConstants& k = codata2018())
{
    return {{"band_gap_ev", m.band_gap.in_ev()},
            {"eps_r", m.eps_r},
            {"m_e_eff", m.m_e_eff / k.m_e},
            {"m_h", m.m_h / k.m_e},
            {"m_eh", m.m_eh / k.m_e},
            {"mass_unit", "m_e"},
            {"E_p_ev", m.E_p.in_ev()},
            {"lattice_const_m", m.lattice_const},
            {"affinity_ev", m.affinity.in_ev()},
            {"work_function_ev", m.work_function.in_ev()}};
}

/// {"materials": {"<name>": {...}, ...}}
[[nodiscard]] inline MaterialRegistry material_registry_from_json(const json& j,
                                                                  const PhysicalConstants& k = codata2018())
{
    const json& all = detail::field(j, "materials", "material registry");
    if (!all.is_object())
        throw invalid_input("material registry: 'materials' must be an object");
    MaterialRegistry reg;
    for (const auto& [name, value] : all.items())
        reg.emplace(name, material_from_json(value, name, k));
    return reg;
}

[[nodiscard]] inline MaterialRegistry builtin_materials()
{
    return {{"zns", zinc_sulfide()}};
}

/// Registry named by QMEAS_MATERIALS if set, else the built-in one.
[[nodiscard]] inline MaterialRegistry default_material_registry()
{
    if (const char* path = std::getenv("QMEAS_MATERIALS"); path && *path)
        return material_registry_from_json(read_json_file(path));
    return builtin_materials();
}

[[nodiscard]] inline const MaterialParams& find_material(const MaterialRegistry& reg, const std::string& name)
{
    const auto it = reg.find(name);
    if (it == reg.end())
        throw invalid_input("unknown material '" + name + "'");
    return it->second;
}

// --------------------------------------------------------------------------
// Scenario.

[[nodiscard]] inline ScenarioConfig scenario_config_from_json(const json& j, const MaterialRegistry& reg,
                                                              const PhysicalConstants& k = codata2018())
{
    using namespace detail;
    const std::string where = "scenario";
    reject_unknown(j,
                   {"name", "beam_energy_ev", "packet_length_m", "loss_rate_ev_per_m", "max_depth_m",
                    "extra_travel_m", "photon_energy_ev", "wavefront_energy_above_Ec_ev", "material", "n_k", "b_k",
                    "sqrt_epsr_mode", "P_Vs"},
                   where);
    ScenarioConfig c;
    c.beam_energy = number_or(j, "beam_energy_ev", c.beam_energy, where);
    c.packet_length = number_or(j, "packet_length_m", c.packet_length, where);
    if (j.contains("loss_rate_ev_per_m") && !j["loss_rate_ev_per_m"].is_null())
        c.loss_rate = number_field(j, "loss_rate_ev_per_m", where);
    c.max_depth = number_or(j, "max_depth_m", c.max_depth, where);
    c.extra_travel = number_or(j, "extra_travel_m", c.extra_travel, where);
    c.photon_energy = number_or(j, "photon_energy_ev", c.photon_energy, where);
    c.wavefront_energy_above_Ec = number_or(j, "wavefront_energy_above_Ec_ev", c.wavefront_energy_above_Ec, where);
    if (j.contains("material")) {
        const json& m = j["material"];
        if (m.is_string())
            c.material = find_material(reg, m.get<std::string>());
        else
            c.material = material_from_json(m, "inline", k);
    }
    c.n_k = number_or(j, "n_k", c.n_k, where);
    if (j.contains("b_k")) {
        const json& b = j["b_k"];
        if (b.is_number())
            c.fixed_bk = b.get<double>();
        else if (!(b.is_null() || b == "solve"))
            throw invalid_input(where + ".b_k: expected a number or \"solve\"");
    }
    if (j.contains("sqrt_epsr_mode")) {
        if (!j["sqrt_epsr_mode"].is_boolean())
            throw invalid_input(where + ".sqrt_epsr_mode: expected true or false");
        c.sqrt_epsr_mode = j["sqrt_epsr_mode"].get<bool>();
    }
    c.P_Vs = number_or(j, "P_Vs", c.P_Vs, where);
    c.validate();
    return c;
}

[[nodiscard]] inline json to_json(const ScenarioConfig& c, const PhysicalConstants& k = codata2018())
{
    return {{"beam_energy_ev", c.beam_energy},
            {"packet_length_m", c.packet_length},
            {"loss_rate_ev_per_m", c.loss_rate ? json(*c.loss_rate) : json(nullptr)},
            {"max_depth_m", c.max_depth},
            {"extra_travel_m", c.extra_travel},
            {"photon_energy_ev", c.photon_energy},
            {"wavefront_energy_above_Ec_ev", c.wavefront_energy_above_Ec},
            {"material", to_json(c.material, k)},
            {"n_k", c.n_k},
            {"b_k", c.fixed_bk ? json(*c.fixed_bk) : json("solve")},
            {"sqrt_epsr_mode", c.sqrt_epsr_mode},
            {"P_Vs", c.P_Vs}};
}

[[nodiscard]] inline json to_json(const CheckRow& r)
{
    return {{"id", r.id},
            {"description", r.description},
            {"computed", r.computed},
            {"reference", r.reference},
            {"tolerance", r.tolerance},
            {"kind", to_string(r.kind)},
            {"status", to_string(r.status())},
            {"note", r.note}};
}

[[nodiscard]] inline json to_json(const ScenarioReport& r)
{
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back(to_json(c));
    return {{"packet_energy_at_front_arrival", r.packet_energy_at_front_arrival},
            {"packet_energy_after_extra_travel", r.packet_energy_after_extra_travel},
            {"traversal_time", r.traversal_time},
            {"n_ph", r.n_ph},
            {"b_k", r.b_k},
            {"kappa_down", r.kappa_down},
            {"kappa_down_alternate", r.kappa_down_alternate},
            {"emission_lifetime", r.emission_lifetime},
            {"photon_sphere_radius", r.photon_sphere_radius},
            {"kappa_up", r.kappa_up},
            {"absorption_lifetime", r.absorption_lifetime},
            {"photon_travel_distance", r.photon_travel_distance},
            {"normalized_photon_yield_lower_bound", r.normalized_photon_yield_lower_bound},
            {"measured_reference", r.measured_reference},
            {"checks", checks}};
}

}  // namespace qmeas::io
