#pragma once

/**
 * @file scenario.hpp
 * @brief Experiment composition: timelines, solver selection, steady-state
 *        reporting, and the data behind the seven reference figures.
 */

#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "csf/analytic.hpp"
#include "csf/defaults.hpp"
#include "csf/integrator.hpp"
#include "csf/timeline.hpp"
#include "csf/trace.hpp"

namespace csf {

enum class SolverChoice { analytic, numeric, both };

inline const char* to_string(SolverChoice s) {
    switch (s) {
        case SolverChoice::analytic: return "analytic";
        case SolverChoice::numeric: return "numeric";
        case SolverChoice::both: return "both";
    }
    return "unknown";
}

/// Uniform output grid [t_start, t_end] with spacing dt.
struct SampleGrid {
    double t_start = 0.0;
    double t_end = 30.0;
    double dt = 0.05;

    std::vector<double> times() const {
        if (!(dt > 0.0) || !(t_end > t_start))
            throw std::invalid_argument("SampleGrid: need dt > 0 and t_end > t_start");
        const auto n = static_cast<std::size_t>(std::floor((t_end - t_start) / dt + 0.5));
        std::vector<double> ts;
        ts.reserve(n + 1);
        for (std::size_t i = 0; i <= n; ++i) ts.push_back(t_start + static_cast<double>(i) * dt);
        return ts;
    }
};

struct Scenario {
    ComplianceModel compliance = ConstantCompliance{defaults::C_0};
    SystemParams params = defaults::params();
    EventTimeline timeline;
    SampleGrid grid;
    SolverChoice solver = SolverChoice::numeric;
    IntegratorConfig integrator;
    std::string id = "scenario";
};

struct SteadyStateReport {
    double P_eq = 0.0;
    std::optional<double> infusion_P_ss;
    std::optional<double> shunt_fixed_point;          // mass-balance value
    std::optional<double> shunt_fixed_point_printed;  // divergent variant, reported only
    double relaxation_rate = 0.0;  // 1/(C(P_eq) R_a) [1/min]
    std::string relaxation_rate_kind;
};

struct RunResult {
    std::optional<PressureTrace> analytic;
    std::optional<PressureTrace> numeric;
    std::optional<double> max_rel_discrepancy;
    SteadyStateReport report;
    std::vector<std::string> warnings;
};

namespace detail {

/// Forced Riccati segment: relaxation from P_start toward P_eq + R_a * S at
/// rate alpha * (P_eq + R_a * S), evaluated a time dt after the segment start.
inline double riccati_forced_relax(const SystemParams& params, double k, double source_rate,
                                   double P_start, double dt) {
    const double p_eq = equilibrium_pressure(params);
    const double alpha = k / params.R_a;
    const double target = p_eq + params.R_a * source_rate;
    const double denom = 1.0 + (target / P_start - 1.0) * std::exp(-alpha * target * dt);
    if (!(denom > 0.0))
        throw SingularityError("riccati segment blow-up", dt);
    return target / denom;
}

inline std::string closed_form_catalog() {
    return "closed forms: constant compliance with {no events, one instant bolus, one infusion, "
           "one shunt}; hyperbolic compliance with {no events, one finite bolus, one instant "
           "bolus, one infusion, one absorption gate}";
}

/// Closed-form pressure for the scenario, if one exists in the catalog.
inline std::optional<std::function<double(double)>> analytic_solution(const Scenario& sc) {
    const auto& events = sc.timeline.events();
    if (events.size() > 1) return std::nullopt;

    if (const auto* cc = std::get_if<ConstantCompliance>(&sc.compliance)) {
        LinearScenario lin = NoSourceLinear{};
        if (!events.empty()) {
            const Event& e = events.front();
            if (const auto* ib = std::get_if<InstantBolusEvent>(&e))
                lin = ImpulseBolus{ib->dV / cc->C0, ib->t_0};
            else if (const auto* inf = std::get_if<InfusionOnEvent>(&e))
                lin = ConstantInfusionLinear{inf->S_i, inf->R_i, inf->t_i};
            else if (const auto* sh = std::get_if<ShuntOnEvent>(&e))
                lin = ShuntLinear{sh->R_s, sh->P_op, sh->t_s};
            else
                return std::nullopt;  // finite bolus / gate: no linear closed form here
        }
        return [lin, params = sc.params, c = *cc](double t) {
            return linear_solve(lin, params, c, t);
        };
    }

    if (const auto* hc = std::get_if<HyperbolicCompliance>(&sc.compliance)) {
        const double k = hc->k;
        const SystemParams params = sc.params;
        if (events.empty())
            return [params, k](double t) { return riccati_no_source(params, k, params.P_0, t); };
        const Event& e = events.front();
        if (const auto* fb = std::get_if<FiniteBolusEvent>(&e)) {
            const FiniteBolus bolus{fb->S_b, fb->t_b, fb->dt_b};
            return [params, k, bolus](double t) {
                return riccati_finite_bolus(params, k, bolus, t);
            };
        }
        if (const auto* ib = std::get_if<InstantBolusEvent>(&e)) {
            const double t_0 = ib->t_0;
            const double dv = ib->dV;
            return [params, k, t_0, dv](double t) {
                if (t < t_0) return riccati_no_source(params, k, params.P_0, t);
                const double before = riccati_no_source(params, k, params.P_0, t_0);
                const double after = before * std::exp(k * dv);
                return riccati_no_source(params, k, after, t - t_0);
            };
        }
        if (const auto* inf = std::get_if<InfusionOnEvent>(&e)) {
            const double t_i = inf->t_i;
            const double s_i = inf->S_i;
            return [params, k, t_i, s_i](double t) {
                if (t < t_i) return riccati_no_source(params, k, params.P_0, t);
                const double at_start = riccati_no_source(params, k, params.P_0, t_i);
                return riccati_forced_relax(params, k, s_i, at_start, t - t_i);
            };
        }
        if (const auto* gate = std::get_if<AbsorptionGateEvent>(&e)) {
            const double t_a = gate->t_a;
            return [params, k, t_a](double t) {
                if (t < t_a) return params.P_0 * std::exp(k * params.I_f_e * t);
                const double at_gate = params.P_0 * std::exp(k * params.I_f_e * t_a);
                return riccati_no_source(params, k, at_gate, t - t_a);
            };
        }
        return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace detail

/// Mirror timeline event parameters into the params blocks so the
/// steady-state formulas can be evaluated from a scenario alone.
inline SystemParams effective_params(const Scenario& sc) {
    SystemParams p = sc.params;
    if (const auto sh = sc.timeline.shunt()) p.shunt = ShuntBlock{sh->R_s, sh->P_op, sh->t_s};
    if (const auto g = sc.timeline.gate()) p.t_a = g->t_a;
    for (const auto& e : sc.timeline.events())
        if (const auto* inf = std::get_if<InfusionOnEvent>(&e))
            p.infusion = InfusionBlock{inf->R_i, inf->S_i, inf->t_i};
    return p;
}

inline SteadyStateReport steady_state_report(const Scenario& sc) {
    SteadyStateReport rep;
    const SystemParams p = effective_params(sc);
    rep.P_eq = equilibrium_pressure(p);
    if (p.infusion) rep.infusion_P_ss = infusion_steady_state(p);
    if (p.shunt) {
        const auto fp = shunted_fixed_point_both(p);
        rep.shunt_fixed_point = fp.mass_balance;
        rep.shunt_fixed_point_printed = fp.printed;
    }
    rep.relaxation_rate = 1.0 / (compliance_at(sc.compliance, rep.P_eq) * p.R_a);
    if (std::holds_alternative<ConstantCompliance>(sc.compliance))
        rep.relaxation_rate_kind = "nu_a";
    else if (std::holds_alternative<HyperbolicCompliance>(sc.compliance))
        rep.relaxation_rate_kind = "alpha_P_eq";
    else
        rep.relaxation_rate_kind = "linearized_at_P_eq";
    return rep;
}

/**
 * @brief Run a scenario with the requested solver(s).
 *
 * With SolverChoice::both the result also carries the maximum pointwise
 * relative discrepancy between the two traces.
 *
 * @throws UnsupportedScenarioError if an analytic trace is requested for a
 *         scenario outside the closed-form catalog.
 */
inline RunResult run(const Scenario& scenario) {
    scenario.params.validate();
    validate(scenario.compliance);
    const std::vector<double> times = scenario.grid.times();

    RunResult result;
    result.report = steady_state_report(scenario);

    const bool want_analytic =
        scenario.solver == SolverChoice::analytic || scenario.solver == SolverChoice::both;
    const bool want_numeric =
        scenario.solver == SolverChoice::numeric || scenario.solver == SolverChoice::both;

    if (want_analytic) {
        const auto solution = detail::analytic_solution(scenario);
        if (!solution)
            throw UnsupportedScenarioError("no closed form for scenario '" + scenario.id + "'; " +
                                           detail::closed_form_catalog());
        PressureTrace trace;
        trace.provenance = Provenance::analytic;
        trace.scenario_id = scenario.id;
        trace.times = times;
        trace.pressures.reserve(times.size());
        for (double t : times) trace.pressures.push_back((*solution)(t));
        trace.validate();
        result.analytic = std::move(trace);
    }
    if (want_numeric) {
        IntegratorConfig cfg = scenario.integrator;
        cfg.sample_grid = times;
        RhsSpec rhs{scenario.compliance, scenario.params, scenario.timeline};
        PressureTrace trace = integrate(rhs, {times.front(), times.back()}, cfg);
        trace.scenario_id = scenario.id;
        result.numeric = std::move(trace);
    }
    if (result.analytic && result.numeric) {
        double worst = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double a = result.analytic->pressures[i];
            const double b = result.numeric->pressures[i];
            worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), 1e-30));
        }
        result.max_rel_discrepancy = worst;
    }

    if (const auto sh = scenario.timeline.shunt()) {
        const PressureTrace& probe = result.numeric ? *result.numeric : *result.analytic;
        double at_ts = probe.pressures.front();
        for (std::size_t i = 0; i < probe.size(); ++i) {
            if (probe.times[i] > sh->t_s) break;
            at_ts = probe.pressures[i];
        }
        if (at_ts <= sh->P_op) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "shunt activation at t_s = %g min but P(t_s) = %g mmH2O does not exceed "
                          "P_op = %g mmH2O; valve premise fails",
                          sh->t_s, at_ts, sh->P_op);
            result.warnings.emplace_back(buf);
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Reference figures
// ---------------------------------------------------------------------------

struct FigureData {
    int id = 0;
    std::string title;
    std::vector<std::string> columns;  // column names, times first
    std::vector<PressureTrace> traces;
    std::vector<std::pair<std::string, std::string>> metadata;
};

/**
 * @brief Data behind the seven reference figures, default parameters
 *        throughout.
 *
 * 1 relaxation, linear;  2 bolus injection, linear;  3 bolus withdrawal,
 * linear;  4 constant infusion, linear;  5 linear-vs-nonlinear relaxation
 * (two traces);  6 rectangle source function (value column is a rate,
 * cc/min);  7 recovery after instantaneous withdrawal, nonlinear.
 */
inline FigureData figure_data(int figure_id) {
    if (figure_id < 1 || figure_id > 7)
        throw std::invalid_argument("figure_data: figure id must be in 1..7, got " +
                                    std::to_string(figure_id));
    const SampleGrid grid;  // 0..30 min at 0.05
    const std::vector<double> times = grid.times();
    const SystemParams params = defaults::params();
    const double p_eq = equilibrium_pressure(params);

    auto analytic_trace = [&](const std::string& id, auto&& f) {
        PressureTrace tr;
        tr.provenance = Provenance::analytic;
        tr.scenario_id = id;
        tr.times = times;
        tr.pressures.reserve(times.size());
        for (double t : times) tr.pressures.push_back(f(t));
        tr.validate();
        return tr;
    };
    auto fmt = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.9g", v);
        return std::string(buf);
    };

    FigureData fig;
    fig.id = figure_id;
    fig.columns = {"t_min", "pressure_mmH2O"};
    const ConstantCompliance c0{defaults::C_0};

    switch (figure_id) {
        case 1: {
            fig.title = "relaxation of the pressure to equilibrium, linear model";
            fig.traces.push_back(analytic_trace(
                "fig1", [&](double t) { return linear_solve(NoSourceLinear{}, params, c0, t); }));
            fig.metadata = {{"model", "constant"}, {"P_eq", fmt(p_eq)}};
            break;
        }
        case 2: {
            fig.title = "bolus injection at t_0, linear model";
            const ImpulseBolus bolus{defaults::P_bar, defaults::t_0};
            fig.traces.push_back(analytic_trace(
                "fig2", [&](double t) { return linear_solve(bolus, params, c0, t); }));
            fig.metadata = {{"model", "constant"},
                            {"P_bar", fmt(bolus.P_bar)},
                            {"t_0", fmt(bolus.t_0)},
                            {"P_eq", fmt(p_eq)}};
            break;
        }
        case 3: {
            fig.title = "bolus withdrawal at t_0, linear model";
            const ImpulseBolus bolus{-defaults::P_bar, defaults::t_0};
            fig.traces.push_back(analytic_trace(
                "fig3", [&](double t) { return linear_solve(bolus, params, c0, t); }));
            fig.metadata = {{"model", "constant"},
                            {"P_bar", fmt(bolus.P_bar)},
                            {"t_0", fmt(bolus.t_0)},
                            {"P_eq", fmt(p_eq)}};
            break;
        }
        case 4: {
            fig.title = "continuous infusion from t_i, linear model";
            const ConstantInfusionLinear inf{defaults::S_i, defaults::R_i, defaults::t_i};
            fig.traces.push_back(analytic_trace(
                "fig4", [&](double t) { return linear_solve(inf, params, c0, t); }));
            SystemParams with_inf = params;
            with_inf.infusion = InfusionBlock{inf.R_i, inf.S_i, inf.t_i};
            fig.metadata = {{"model", "constant"},
                            {"S_i", fmt(inf.S_i)},
                            {"t_i", fmt(inf.t_i)},
                            {"P_ss", fmt(infusion_steady_state(with_inf))}};
            break;
        }
        case 5: {
            fig.title = "linear vs nonlinear relaxation at equal initial pressure";
            fig.columns = {"t_min", "pressure_mmH2O_linear", "pressure_mmH2O_nonlinear"};
            fig.traces.push_back(analytic_trace(
                "fig5_linear", [&](double t) { return linear_solve(NoSourceLinear{}, params, c0, t); }));
            fig.traces.push_back(analytic_trace("fig5_nonlinear", [&](double t) {
                return riccati_no_source(params, defaults::k, params.P_0, t);
            }));
            // Measure which model relaxes faster: first grid time at which the
            // excess over P_eq has fallen to half its initial value.
            const double half = p_eq + 0.5 * (params.P_0 - p_eq);
            double t_half[2] = {times.back(), times.back()};
            for (int m = 0; m < 2; ++m)
                for (std::size_t i = 0; i < times.size(); ++i)
                    if (fig.traces[static_cast<std::size_t>(m)].pressures[i] <= half) {
                        t_half[m] = times[i];
                        break;
                    }
            const double nu_a = 1.0 / (defaults::C_0 * params.R_a);
            const double alpha_peq = (defaults::k / params.R_a) * p_eq;
            fig.metadata = {
                {"linear_rate_nu_a", fmt(nu_a)},
                {"nonlinear_rate_alpha_P_eq", fmt(alpha_peq)},
                {"t_half_linear", fmt(t_half[0])},
                {"t_half_nonlinear", fmt(t_half[1])},
                {"faster_relaxation", t_half[0] < t_half[1] ? "linear" : "nonlinear"}};
            break;
        }
        case 6: {
            fig.title = "rectangle source function of the finite bolus";
            fig.columns = {"t_min", "source_cc_per_min"};
            const double on = defaults::t_b;
            const double off = defaults::t_b + defaults::dt_b;
            fig.traces.push_back(analytic_trace("fig6", [&](double t) {
                return (t >= on && t <= off) ? defaults::S_b : 0.0;
            }));
            fig.metadata = {{"S_b", fmt(defaults::S_b)},
                            {"t_b", fmt(defaults::t_b)},
                            {"dt_b", fmt(defaults::dt_b)},
                            {"note", "value column is the source rate, not a pressure"}};
            break;
        }
        case 7: {
            fig.title = "recovery after an instantaneous withdrawal, nonlinear model";
            // Withdrawal volume equivalent to the linear pulse: P_bar * C_0.
            const double dv = -defaults::P_bar * defaults::C_0;
            SystemParams from_eq = params;
            from_eq.P_0 = p_eq;
            const double t_0 = defaults::t_0;
            fig.traces.push_back(analytic_trace("fig7", [&](double t) {
                if (t < t_0) return p_eq;
                const double dropped = p_eq * std::exp(defaults::k * dv);
                return riccati_no_source(from_eq, defaults::k, dropped, t - t_0);
            }));
            fig.metadata = {{"model", "hyperbolic"},
                            {"dV", fmt(dv)},
                            {"t_0", fmt(t_0)},
                            {"P_post_jump", fmt(p_eq * std::exp(defaults::k * dv))},
                            {"P_eq", fmt(p_eq)}};
            break;
        }
        default: break;
    }
    return fig;
}

}  // namespace csf
