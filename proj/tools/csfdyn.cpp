// csfdyn: simulate CSF pressure scenarios, regenerate the reference figures,
// fit traces, and run the self-validation suite.
//
// Exit codes: 0 success; 1 validation failure; 2 configuration or input
// format error; 3 solver singularity; 4 I/O failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "csf/csf.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json report_json(const csf::RunResult& result, const csf::Scenario& scenario) {
    ordered_json j;
    j["scenario"] = scenario.id;
    j["solver"] = csf::to_string(scenario.solver);
    j["P_eq"] = result.report.P_eq;
    if (result.report.infusion_P_ss) j["infusion_P_ss"] = *result.report.infusion_P_ss;
    if (result.report.shunt_fixed_point) {
        j["shunt_fixed_point"] = *result.report.shunt_fixed_point;
        j["shunt_fixed_point_printed"] = *result.report.shunt_fixed_point_printed;
    }
    j["relaxation_rate"] = result.report.relaxation_rate;
    j["relaxation_rate_kind"] = result.report.relaxation_rate_kind;
    if (result.max_rel_discrepancy) j["max_rel_discrepancy"] = *result.max_rel_discrepancy;
    j["warnings"] = result.warnings;
    return j;
}

ordered_json fit_json(const csf::FitReport& fit) {
    ordered_json j;
    j["model"] = fit.model;
    ordered_json params;
    for (const auto& [name, value] : fit.parameters) params[name] = value;
    j["parameters"] = params;
    j["rss"] = fit.rss;
    j["iterations"] = fit.iterations;
    j["final_step_norm"] = fit.final_step_norm;
    j["converged"] = fit.converged;
    if (!fit.note.empty()) j["note"] = fit.note;
    return j;
}

void emit(const std::optional<std::string>& out_path, const std::string& content) {
    if (out_path)
        csf::write_file_atomic(*out_path, content);
    else
        std::cout << content;
}

int cmd_simulate(const std::optional<std::string>& config_path,
                 const std::optional<std::string>& solver_override, const std::string& out_path,
                 const std::optional<std::string>& report_path, bool show_defaults) {
    csf::RunConfig cfg;
    std::string id = "defaults";
    if (config_path) {
        cfg = csf::read_config(*config_path);
        id = std::filesystem::path(*config_path).stem().string();
    }
    if (show_defaults) {
        std::cout << csf::default_reference_config();
        return 0;
    }
    if (solver_override) cfg.solver = *solver_override;

    const csf::Scenario scenario = csf::to_scenario(cfg, id);
    const csf::RunResult result = csf::run(scenario);
    const csf::PressureTrace& trace = result.numeric ? *result.numeric : *result.analytic;
    csf::write_file_atomic(out_path, csf::trace_to_csv(trace));
    if (report_path) {
        ordered_json j = report_json(result, scenario);
        j["trace_provenance"] = csf::to_string(trace.provenance);
        j["samples"] = trace.size();
        csf::write_file_atomic(*report_path, j.dump(2) + "\n");
    }
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
}

int cmd_figures(const std::string& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "error: cannot create " << out_dir << ": " << ec.message() << "\n";
        return 4;
    }
    for (int id = 1; id <= 7; ++id) {
        const csf::FigureData fig = csf::figure_data(id);
        const std::filesystem::path path =
            std::filesystem::path(out_dir) / ("fig" + std::to_string(id) + ".csv");
        csf::write_file_atomic(path, csf::figure_to_csv(fig));
    }
    return 0;
}

int cmd_fit(const std::string& trace_path, const std::string& model,
            const std::optional<double>& dv, double t0, const std::optional<double>& fix_k,
            const std::optional<double>& fix_ra, const std::optional<double>& fix_peq,
            double engine_ra, double engine_ife, double engine_pd,
            const std::optional<std::string>& out_path) {
    csf::PressureTrace trace = csf::read_trace_csv(trace_path);
    if (t0 > 0.0) {
        csf::PressureTrace cropped;
        cropped.provenance = trace.provenance;
        cropped.scenario_id = trace.scenario_id;
        for (std::size_t i = 0; i < trace.size(); ++i)
            if (trace.times[i] >= t0) {
                cropped.times.push_back(trace.times[i] - t0);
                cropped.pressures.push_back(trace.pressures[i]);
            }
        trace = std::move(cropped);
    }

    csf::FitReport fit;
    if (model == "bolus") {
        if (!dv) {
            std::cerr << "error: --dV is required for the bolus-response fit\n";
            return 2;
        }
        csf::BolusFitKnowns knowns;
        knowns.dV = *dv;
        knowns.k = fix_k;
        knowns.R_a = fix_ra;
        knowns.P_eq = fix_peq;
        fit = csf::fit_bolus_response(trace, knowns);
    } else {
        csf::ComplianceModel candidate = csf::ConstantCompliance{csf::defaults::C_0};
        if (model == "hyperbolic") candidate = csf::HyperbolicCompliance{csf::defaults::k};
        else if (model == "shifted_hyperbolic") candidate = csf::ShiftedHyperbolicCompliance{1.0, 1.0};
        else if (model == "lim") candidate = csf::ExponentialCompliance{0.004, 0.0004};
        csf::CompareOptions options;
        options.params.R_a = engine_ra;
        options.params.I_f_e = engine_ife;
        options.params.P_d = engine_pd;
        fit = csf::compare_models(trace, {candidate}, options).front();
        if (!fit.note.empty() && std::isinf(fit.rss))
            throw csf::RankDeficiencyError("fit failed: " + fit.note);
    }
    emit(out_path, fit_json(fit).dump(2) + "\n");
    return 0;
}

int cmd_validate() {
    const std::vector<csf::CheckResult> results = csf::validation::run_validation_suite();
    bool all_pass = true;
    std::printf("%-34s %-6s %-14s %-14s\n", "check", "status", "measured", "tolerance");
    for (const auto& r : results) {
        all_pass = all_pass && r.pass;
        std::printf("%-34s %-6s %-14.6g %-14.6g %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL",
                    r.measured, r.tolerance, r.pass ? "" : r.detail.c_str());
    }
    if (!all_pass) {
        std::printf("validation FAILED\n");
        return 1;
    }
    std::printf("all checks passed\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CSF pressure-volume dynamics laboratory"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "integrate a configured scenario to CSV");
    std::optional<std::string> config_path, solver_override, report_path;
    std::string out_path = "trace.csv";
    bool show_defaults = false;
    simulate->add_option("--config", config_path, "run configuration file");
    simulate->add_option("--solver", solver_override, "override solver: analytic|numeric|both")
        ->check(CLI::IsMember({"analytic", "numeric", "both"}));
    simulate->add_option("--out", out_path, "output trace CSV path");
    simulate->add_option("--report", report_path, "write a JSON steady-state report");
    simulate->add_flag("--show-defaults", show_defaults, "print the default configuration and exit");

    // figures
    auto* figures = app.add_subcommand("figures", "emit fig1.csv ... fig7.csv");
    std::string out_dir = ".";
    figures->add_option("--out-dir", out_dir, "output directory");

    // fit
    auto* fit = app.add_subcommand("fit", "fit a model to a trace CSV, JSON report out");
    std::string trace_path, fit_model = "bolus";
    std::optional<double> dv, fix_k, fix_ra, fix_peq;
    std::optional<std::string> fit_out;
    double t0 = 0.0;
    double engine_ra = csf::defaults::R_a;
    double engine_ife = csf::defaults::I_f_e;
    double engine_pd = csf::defaults::P_d;
    fit->add_option("--trace", trace_path, "trace CSV (t_min,pressure_mmH2O)")->required();
    fit->add_option("--model", fit_model,
                    "bolus | constant | hyperbolic | shifted_hyperbolic | lim")
        ->check(CLI::IsMember({"bolus", "constant", "hyperbolic", "shifted_hyperbolic", "lim"}));
    fit->add_option("--dV", dv, "injected volume in cc (bolus model)");
    fit->add_option("--t0", t0, "crop the trace to t >= t0 and re-zero time at t0");
    fit->add_option("--fix-k", fix_k, "pin k instead of fitting it");
    fit->add_option("--fix-R_a", fix_ra, "pin R_a instead of fitting it");
    fit->add_option("--fix-P_eq", fix_peq, "pin P_eq instead of fitting it");
    fit->add_option("--R_a", engine_ra, "absorption resistance for engine-backed fits");
    fit->add_option("--I_f_e", engine_ife, "formation rate for engine-backed fits");
    fit->add_option("--P_d", engine_pd, "threshold pressure for engine-backed fits");
    fit->add_option("--out", fit_out, "write the JSON report here instead of stdout");

    // validate
    auto* validate = app.add_subcommand("validate", "run the self-check suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed())
            return cmd_simulate(config_path, solver_override, out_path, report_path, show_defaults);
        if (figures->parsed()) return cmd_figures(out_dir);
        if (fit->parsed())
            return cmd_fit(trace_path, fit_model, dv, t0, fix_k, fix_ra, fix_peq, engine_ra,
                           engine_ife, engine_pd, fit_out);
        if (validate->parsed()) return cmd_validate();
    } catch (const csf::ConfigParseError& e) {
        std::cerr << "error (line " << e.line();
        if (!e.key().empty()) std::cerr << ", key '" << e.key() << "'";
        std::cerr << "): " << e.what() << "\n";
        return 2;
    } catch (const csf::SingularityError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const csf::UnsupportedScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const csf::RankDeficiencyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const csf::InsufficientDataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const csf::ConfigurationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
