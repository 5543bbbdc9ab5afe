#pragma once

/**
 * @file config.hpp
 * @brief Run configuration: strict INI-style schema with default parameter
 *        values, round-trippable dump, and conversion to a Scenario.
 *
 * Layout:
 *
 *     [compliance]
 *     model = hyperbolic          # constant | hyperbolic | shifted_hyperbolic | exponential
 *     C_0 = 0.004                 # constant law
 *     k = 1                       # hyperbolic law
 *     k_1 = 1                     # shifted hyperbolic law (required with k_2)
 *     k_2 = 10
 *     a = 0.004                   # exponential law (required with b)
 *     b = 0.0004
 *
 *     [params]
 *     R_a = 600
 *     I_f_e = 0.078
 *     P_d = 70
 *     P_0 = 244
 *     P_prime = 150
 *
 *     [bolus]                     # finite bolus; section presence enables it
 *     S_b = 40
 *     t_b = 5
 *     dt_b = 5
 *
 *     [instant_bolus]
 *     dV = 0.16                   # cc; alternatively P_bar (pressure pulse, dV = P_bar * C_0)
 *     t_0 = 4
 *
 *     [infusion]
 *     S_i = 0.216
 *     R_i = 600
 *     t_i = 4
 *
 *     [shunt]
 *     R_s = 60
 *     P_op = 45
 *     t_s = 5
 *
 *     [absorption_gate]
 *     t_a = 10                    # required when the section is present
 *
 *     [output]
 *     t_end = 30
 *     dt_out = 0.05
 *     solver = numeric            # analytic | numeric | both
 *
 * Unknown sections or keys are rejected with the offending line. Missing keys
 * fall back to the defaults above.
 */

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "csf/defaults.hpp"
#include "csf/errors.hpp"
#include "csf/scenario.hpp"

namespace csf {

struct RunConfig {
    // [compliance]
    std::string model = "constant";
    double C_0 = defaults::C_0;
    double k = defaults::k;
    std::optional<double> k_1, k_2;  // required for shifted_hyperbolic
    std::optional<double> a, b;      // required for exponential

    // [params]
    double R_a = defaults::R_a;
    double I_f_e = defaults::I_f_e;
    double P_d = defaults::P_d;
    double P_0 = defaults::P_0;
    double P_prime = defaults::P_prime;

    // events (each enabled by its section)
    bool bolus_enabled = false;
    double S_b = defaults::S_b;
    double t_b = defaults::t_b;
    double dt_b = defaults::dt_b;

    bool instant_bolus_enabled = false;
    std::optional<double> dV;     // defaults to P_bar * C_0 when absent
    double P_bar = defaults::P_bar;
    double t_0 = defaults::t_0;

    bool infusion_enabled = false;
    double S_i = defaults::S_i;
    double R_i = defaults::R_i;
    double t_i = defaults::t_i;

    bool shunt_enabled = false;
    double R_s = defaults::R_s;
    double P_op = defaults::P_op;
    double t_s = defaults::t_s;

    bool gate_enabled = false;
    std::optional<double> t_a;  // required when the section is present

    // [output]
    double t_end = 30.0;
    double dt_out = 0.05;
    std::string solver = "numeric";

    double instant_bolus_volume() const { return dV ? *dV : P_bar * C_0; }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline double parse_number(const std::string& value, const std::string& key, int line) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw ConfigParseError("value of '" + key + "' is not a number: '" + value + "'", line, key);
    return v;
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text, const std::string& source_name = "config") {
    static const std::map<std::string, std::vector<std::string>> schema = {
        {"compliance", {"model", "C_0", "k", "k_1", "k_2", "a", "b"}},
        {"params", {"R_a", "I_f_e", "P_d", "P_0", "P_prime"}},
        {"bolus", {"S_b", "t_b", "dt_b"}},
        {"instant_bolus", {"dV", "P_bar", "t_0"}},
        {"infusion", {"S_i", "R_i", "t_i"}},
        {"shunt", {"R_s", "P_op", "t_s"}},
        {"absorption_gate", {"t_a"}},
        {"output", {"t_end", "dt_out", "solver"}}};

    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int lineno = 0;
    bool dv_given = false, pbar_given = false;

    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        const auto hash = raw.find('#');
        std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigParseError(source_name + ": unterminated section header", lineno);
            section = detail::trim(line.substr(1, line.size() - 2));
            if (schema.find(section) == schema.end())
                throw ConfigParseError(source_name + ": unknown section [" + section + "]", lineno,
                                       section);
            if (section == "bolus") cfg.bolus_enabled = true;
            if (section == "instant_bolus") cfg.instant_bolus_enabled = true;
            if (section == "infusion") cfg.infusion_enabled = true;
            if (section == "shunt") cfg.shunt_enabled = true;
            if (section == "absorption_gate") cfg.gate_enabled = true;
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigParseError(source_name + ": expected 'key = value'", lineno);
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigParseError(source_name + ": key '" + key + "' outside any section", lineno,
                                   key);
        const auto& allowed = schema.at(section);
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigParseError(
                source_name + ": unknown key '" + key + "' in section [" + section + "]", lineno,
                key);

        if (key == "model") {
            if (value != "constant" && value != "hyperbolic" && value != "shifted_hyperbolic" &&
                value != "exponential")
                throw ConfigParseError(source_name + ": unknown compliance model '" + value + "'",
                                       lineno, key);
            cfg.model = value;
            continue;
        }
        if (key == "solver") {
            if (value != "analytic" && value != "numeric" && value != "both")
                throw ConfigParseError(source_name + ": unknown solver '" + value + "'", lineno,
                                       key);
            cfg.solver = value;
            continue;
        }

        const double v = detail::parse_number(value, key, lineno);
        if (key == "C_0") cfg.C_0 = v;
        else if (key == "k") cfg.k = v;
        else if (key == "k_1") cfg.k_1 = v;
        else if (key == "k_2") cfg.k_2 = v;
        else if (key == "a") cfg.a = v;
        else if (key == "b") cfg.b = v;
        else if (key == "R_a") cfg.R_a = v;
        else if (key == "I_f_e") cfg.I_f_e = v;
        else if (key == "P_d") cfg.P_d = v;
        else if (key == "P_0") cfg.P_0 = v;
        else if (key == "P_prime") cfg.P_prime = v;
        else if (key == "S_b") cfg.S_b = v;
        else if (key == "t_b") cfg.t_b = v;
        else if (key == "dt_b") cfg.dt_b = v;
        else if (key == "dV") { cfg.dV = v; dv_given = true; }
        else if (key == "P_bar") { cfg.P_bar = v; pbar_given = true; }
        else if (key == "t_0") cfg.t_0 = v;
        else if (key == "S_i") cfg.S_i = v;
        else if (key == "R_i") cfg.R_i = v;
        else if (key == "t_i") cfg.t_i = v;
        else if (key == "R_s") cfg.R_s = v;
        else if (key == "P_op") cfg.P_op = v;
        else if (key == "t_s") cfg.t_s = v;
        else if (key == "t_a") cfg.t_a = v;
        else if (key == "t_end") cfg.t_end = v;
        else if (key == "dt_out") cfg.dt_out = v;
    }

    if (dv_given && pbar_given)
        throw ConfigParseError(source_name + ": give either dV or P_bar, not both", lineno, "dV");
    if (cfg.model == "shifted_hyperbolic" && (!cfg.k_1 || !cfg.k_2))
        throw ConfigParseError(source_name + ": shifted_hyperbolic model requires k_1 and k_2",
                               lineno, !cfg.k_1 ? "k_1" : "k_2");
    if (cfg.model == "exponential" && (!cfg.a || !cfg.b))
        throw ConfigParseError(source_name + ": exponential model requires a and b", lineno,
                               !cfg.a ? "a" : "b");
    if (cfg.gate_enabled && !cfg.t_a)
        throw ConfigParseError(source_name + ": [absorption_gate] requires t_a", lineno, "t_a");
    return cfg;
}

inline RunConfig read_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.filename().string());
}

namespace detail {

/// Shortest decimal form that parses back to exactly the same double.
inline std::string shortest_exact(double v) {
    char buf[40];
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        std::snprintf(buf, sizeof buf, "%.0f", v);
        return buf;
    }
    for (int digits = 1; digits <= 17; ++digits) {
        std::snprintf(buf, sizeof buf, "%.*g", digits, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

}  // namespace detail

/// Full-precision dump; re-parsing reproduces the same effective run.
inline std::string dump_config(const RunConfig& cfg) {
    auto num = [](double v) { return detail::shortest_exact(v); };
    std::string out;
    out += "[compliance]\nmodel = " + cfg.model + "\n";
    out += "C_0 = " + num(cfg.C_0) + "\nk = " + num(cfg.k) + "\n";
    if (cfg.k_1) out += "k_1 = " + num(*cfg.k_1) + "\n";
    if (cfg.k_2) out += "k_2 = " + num(*cfg.k_2) + "\n";
    if (cfg.a) out += "a = " + num(*cfg.a) + "\n";
    if (cfg.b) out += "b = " + num(*cfg.b) + "\n";
    out += "\n[params]\n";
    out += "R_a = " + num(cfg.R_a) + "\nI_f_e = " + num(cfg.I_f_e) + "\nP_d = " + num(cfg.P_d) +
           "\nP_0 = " + num(cfg.P_0) + "\nP_prime = " + num(cfg.P_prime) + "\n";
    if (cfg.bolus_enabled) {
        out += "\n[bolus]\n";
        out += "S_b = " + num(cfg.S_b) + "\nt_b = " + num(cfg.t_b) + "\ndt_b = " + num(cfg.dt_b) +
               "\n";
    }
    if (cfg.instant_bolus_enabled) {
        out += "\n[instant_bolus]\n";
        out += "dV = " + num(cfg.instant_bolus_volume()) + "\nt_0 = " + num(cfg.t_0) + "\n";
    }
    if (cfg.infusion_enabled) {
        out += "\n[infusion]\n";
        out += "S_i = " + num(cfg.S_i) + "\nR_i = " + num(cfg.R_i) + "\nt_i = " + num(cfg.t_i) +
               "\n";
    }
    if (cfg.shunt_enabled) {
        out += "\n[shunt]\n";
        out += "R_s = " + num(cfg.R_s) + "\nP_op = " + num(cfg.P_op) + "\nt_s = " + num(cfg.t_s) +
               "\n";
    }
    if (cfg.gate_enabled) out += "\n[absorption_gate]\nt_a = " + num(*cfg.t_a) + "\n";
    out += "\n[output]\n";
    out += "t_end = " + num(cfg.t_end) + "\ndt_out = " + num(cfg.dt_out) +
           "\nsolver = " + cfg.solver + "\n";
    return out;
}

/// Reference configuration: every default value, with the event sections
/// present but commented out (a section's presence is what enables it).
inline std::string default_reference_config() {
    const RunConfig cfg;
    auto num = [](double v) { return detail::shortest_exact(v); };
    std::string out = dump_config(cfg);
    out += "\n# event sections (uncomment a whole section to enable it):\n";
    out += "# [bolus]\n# S_b = " + num(cfg.S_b) + "\n# t_b = " + num(cfg.t_b) +
           "\n# dt_b = " + num(cfg.dt_b) + "\n";
    out += "# [instant_bolus]\n# dV = " + num(cfg.instant_bolus_volume()) +
           "\n# P_bar = " + num(cfg.P_bar) + "\n# t_0 = " + num(cfg.t_0) + "\n";
    out += "# [infusion]\n# S_i = " + num(cfg.S_i) + "\n# R_i = " + num(cfg.R_i) +
           "\n# t_i = " + num(cfg.t_i) + "\n";
    out += "# [shunt]\n# R_s = " + num(cfg.R_s) + "\n# P_op = " + num(cfg.P_op) +
           "\n# t_s = " + num(cfg.t_s) + "\n";
    out += "# [absorption_gate]\n# t_a = \n";
    return out;
}

inline ComplianceModel compliance_from(const RunConfig& cfg) {
    if (cfg.model == "constant") return ConstantCompliance{cfg.C_0};
    if (cfg.model == "hyperbolic") return HyperbolicCompliance{cfg.k};
    if (cfg.model == "shifted_hyperbolic") return ShiftedHyperbolicCompliance{*cfg.k_1, *cfg.k_2};
    return ExponentialCompliance{*cfg.a, *cfg.b};
}

inline Scenario to_scenario(const RunConfig& cfg, const std::string& id = "config") {
    Scenario sc;
    sc.id = id;
    sc.compliance = compliance_from(cfg);
    sc.params.R_a = cfg.R_a;
    sc.params.I_f_e = cfg.I_f_e;
    sc.params.P_d = cfg.P_d;
    sc.params.P_0 = cfg.P_0;
    if (cfg.bolus_enabled) sc.timeline.add(FiniteBolusEvent{cfg.S_b, cfg.t_b, cfg.dt_b});
    if (cfg.instant_bolus_enabled)
        sc.timeline.add(InstantBolusEvent{cfg.instant_bolus_volume(), cfg.t_0});
    if (cfg.infusion_enabled) sc.timeline.add(InfusionOnEvent{cfg.S_i, cfg.R_i, cfg.t_i});
    if (cfg.shunt_enabled) sc.timeline.add(ShuntOnEvent{cfg.R_s, cfg.P_op, cfg.t_s});
    if (cfg.gate_enabled) sc.timeline.add(AbsorptionGateEvent{*cfg.t_a});
    sc.grid = SampleGrid{0.0, cfg.t_end, cfg.dt_out};
    if (cfg.solver == "analytic") sc.solver = SolverChoice::analytic;
    else if (cfg.solver == "both") sc.solver = SolverChoice::both;
    else sc.solver = SolverChoice::numeric;
    return sc;
}

}  // namespace csf
