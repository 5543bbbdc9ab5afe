#pragma once

/**
 * @file validation.hpp
 * @brief Self-check suite: oracle equivalence of every closed form against
 *        the numerical engine, fixed-point universality, jump laws,
 *        continuity, estimation round trips, and figure determinism.
 */

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "csf/analytic.hpp"
#include "csf/csv.hpp"
#include "csf/defaults.hpp"
#include "csf/estimation.hpp"
#include "csf/integrator.hpp"
#include "csf/scenario.hpp"

namespace csf {

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

namespace validation {

/// Max relative deviation between a closed form and the numerical engine on
/// the scenario's grid.
inline CheckResult check_closed_form_against_numeric(
    const std::string& name, const ComplianceModel& model, const SystemParams& params,
    const EventTimeline& timeline, const std::function<double(double)>& closed_form,
    double t_end = 60.0, double tolerance = 1e-6) {
    SampleGrid grid{0.0, t_end, 0.1};
    const std::vector<double> times = grid.times();
    IntegratorConfig cfg;
    cfg.sample_grid = times;
    const PressureTrace numeric = integrate(RhsSpec{model, params, timeline},
                                            {times.front(), times.back()}, cfg);
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double a = closed_form(times[i]);
        worst = std::max(worst, std::abs(a - numeric.pressures[i]) / std::max(std::abs(a), 1e-30));
    }
    return {name, worst <= tolerance, worst, tolerance, "max relative deviation from numeric"};
}

inline double bisect_fixed_point(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

inline std::vector<ComplianceModel> reference_models() {
    return {ConstantCompliance{defaults::C_0}, HyperbolicCompliance{defaults::k},
            ShiftedHyperbolicCompliance{1.0, 10.0}, ExponentialCompliance{0.004, 0.0004}};
}

inline std::vector<CheckResult> run_validation_suite() {
    std::vector<CheckResult> results;
    const SystemParams params = defaults::params();
    const ConstantCompliance c0{defaults::C_0};
    const HyperbolicCompliance hk{defaults::k};
    const double p_eq = equilibrium_pressure(params);
    const double kk = defaults::k;

    // Closed forms of the linear family vs the engine.
    results.push_back(check_closed_form_against_numeric(
        "linear_no_source", ComplianceModel{c0}, params, EventTimeline{},
        [&](double t) { return linear_solve(NoSourceLinear{}, params, c0, t); }));
    {
        EventTimeline tl;
        tl.add(InstantBolusEvent{defaults::P_bar * defaults::C_0, defaults::t_0});
        results.push_back(check_closed_form_against_numeric(
            "linear_impulse_bolus", ComplianceModel{c0}, params, tl, [&](double t) {
                return linear_solve(ImpulseBolus{defaults::P_bar, defaults::t_0}, params, c0, t);
            }));
    }
    {
        EventTimeline tl;
        tl.add(InfusionOnEvent{defaults::S_i, defaults::R_i, defaults::t_i});
        results.push_back(check_closed_form_against_numeric(
            "linear_infusion", ComplianceModel{c0}, params, tl, [&](double t) {
                return linear_solve(ConstantInfusionLinear{defaults::S_i, defaults::R_i,
                                                           defaults::t_i},
                                    params, c0, t);
            }));
    }
    {
        EventTimeline tl;
        tl.add(ShuntOnEvent{defaults::R_s, defaults::P_op, defaults::t_s});
        results.push_back(check_closed_form_against_numeric(
            "linear_shunt", ComplianceModel{c0}, params, tl, [&](double t) {
                return linear_solve(ShuntLinear{defaults::R_s, defaults::P_op, defaults::t_s},
                                    params, c0, t);
            }));
    }

    // Riccati family vs the engine.
    results.push_back(check_closed_form_against_numeric(
        "riccati_no_source", ComplianceModel{hk}, params, EventTimeline{},
        [&](double t) { return riccati_no_source(params, kk, params.P_0, t); }));
    {
        const FiniteBolus bolus{defaults::S_b, defaults::t_b, defaults::dt_b};
        EventTimeline tl;
        tl.add(FiniteBolusEvent{bolus.S_b, bolus.t_b, bolus.dt_b});
        results.push_back(check_closed_form_against_numeric(
            "riccati_finite_bolus", ComplianceModel{hk}, params, tl,
            [&](double t) { return riccati_finite_bolus(params, kk, bolus, t); }));
    }
    {
        SystemParams from_eq = params;
        from_eq.P_0 = p_eq;
        const double dv = defaults::P_bar * defaults::C_0;
        EventTimeline tl;
        tl.add(InstantBolusEvent{dv, 0.0});
        results.push_back(check_closed_form_against_numeric(
            "riccati_instant_bolus", ComplianceModel{hk}, from_eq, tl,
            [&](double t) { return riccati_instant_bolus(from_eq, kk, dv, t); }));
    }
    {
        const double dv_withdrawn = defaults::P_bar * defaults::C_0;
        SystemParams gated = params;
        gated.P_0 = p_eq * std::exp(-kk * dv_withdrawn);
        const double t_a = 61.0;  // gate off over the whole check window
        EventTimeline tl;
        tl.add(AbsorptionGateEvent{t_a});
        results.push_back(check_closed_form_against_numeric(
            "riccati_gated_growth", ComplianceModel{hk}, gated, tl,
            [&](double t) { return riccati_gated_growth(gated, kk, dv_withdrawn, t_a, t); }));
    }
    {
        SystemParams from_eq = params;
        from_eq.P_0 = p_eq;
        EventTimeline tl;
        tl.add(InfusionOnEvent{defaults::S_i, defaults::R_i, defaults::t_i});
        results.push_back(check_closed_form_against_numeric(
            "riccati_infusion", ComplianceModel{hk}, from_eq, tl,
            [&](double t) { return riccati_infusion(from_eq, kk, defaults::S_i, defaults::t_i, t); }));
    }

    // Fixed-point universality: the root of the balance equation is the same
    // under every compliance law.
    {
        double worst = 0.0;
        for (const auto& model : reference_models()) {
            const RhsSpec rhs{model, params, EventTimeline{}};
            const double root = bisect_fixed_point([&](double p) { return rhs(0.0, p); }, 1.0, 1e4);
            worst = std::max(worst, std::abs(root - p_eq) / p_eq);
        }
        results.push_back({"fixed_point_universality", worst <= 1e-9, worst, 1e-9,
                           "relative spread of balance-equation roots across compliance laws"});
    }
    {
        double worst = 0.0;
        for (const auto& model : reference_models()) {
            IntegratorConfig cfg;
            cfg.sample_grid = {0.0, 30.0, 60.0};
            const PressureTrace tr = integrate(RhsSpec{model, params, EventTimeline{}},
                                               {0.0, 60.0}, cfg);
            worst = std::max(worst, std::abs(tr.pressures.back() - p_eq) / p_eq);
        }
        results.push_back({"long_time_universality", worst <= 1e-4, worst, 1e-4,
                           "relative deviation of P(60) from P_eq across compliance laws"});
    }

    // Linear-vs-nonlinear infusion steady state, two algebraic routes.
    {
        SystemParams with_inf = params;
        with_inf.infusion = InfusionBlock{defaults::R_i, defaults::S_i, defaults::t_i};
        const double direct = p_eq + with_inf.R_a * defaults::S_i;
        const double via_ratio =
            p_eq + (with_inf.R_a / defaults::R_i) * (defaults::R_i * defaults::S_i);
        const double diff = std::abs(direct - via_ratio) / direct;
        const double tol = 16.0 * std::numeric_limits<double>::epsilon();
        results.push_back({"infusion_steady_state_identity", diff <= tol, diff, tol,
                           "relative gap between R_a*S_i and (nu_i/nu_a)*P_i routes"});
    }

    // Jump laws. The linear jump is measured by differencing runs with and
    // without the bolus: pre-jump trajectories coincide, so the sampled
    // difference at t_0 is exactly the applied pulse.
    {
        EventTimeline with_bolus;
        with_bolus.add(InstantBolusEvent{defaults::P_bar * defaults::C_0, defaults::t_0});
        IntegratorConfig cfg;
        cfg.sample_grid = SampleGrid{0.0, 8.0, 0.5}.times();
        const PressureTrace a =
            integrate(RhsSpec{ComplianceModel{c0}, params, with_bolus}, {0.0, 8.0}, cfg);
        const PressureTrace b =
            integrate(RhsSpec{ComplianceModel{c0}, params, EventTimeline{}}, {0.0, 8.0}, cfg);
        std::size_t j = 0;
        while (a.times[j] < defaults::t_0) ++j;
        const double err = std::abs(a.pressures[j] - b.pressures[j] - defaults::P_bar);
        results.push_back({"jump_law_linear", err <= 1e-4, err, 1e-4,
                           "additive jump minus P_bar, mmH2O"});
    }
    {
        SystemParams p0 = params;
        p0.P_0 = 200.0;
        const double dv = 0.2;
        EventTimeline tl;
        tl.add(InstantBolusEvent{dv, 0.0});
        IntegratorConfig cfg;
        cfg.sample_grid = {0.0, 1.0, 2.0};
        const PressureTrace tr = integrate(RhsSpec{ComplianceModel{hk}, p0, tl}, {0.0, 2.0}, cfg);
        const double err = std::abs(std::log(tr.pressures.front() / p0.P_0) - kk * dv);
        results.push_back({"jump_law_nonlinear", err <= 1e-9, err, 1e-9,
                           "|ln P+ - ln P- - k dV| across the engine's state jump"});
    }

    // Gated regime: engine with absorption off matches pure growth.
    {
        SystemParams gated = params;
        gated.P_0 = 100.0;
        EventTimeline tl;
        tl.add(AbsorptionGateEvent{10.0});
        SampleGrid grid{0.0, 9.9, 0.1};
        IntegratorConfig cfg;
        cfg.sample_grid = grid.times();
        const PressureTrace tr = integrate(RhsSpec{ComplianceModel{hk}, gated, tl}, {0.0, 9.9}, cfg);
        double worst = 0.0;
        for (std::size_t i = 0; i < tr.size(); ++i) {
            const double expect = gated.P_0 * std::exp(kk * params.I_f_e * tr.times[i]);
            worst = std::max(worst, std::abs(tr.pressures[i] - expect) / expect);
        }
        results.push_back({"gated_growth_regime", worst <= 1e-6, worst, 1e-6,
                           "relative deviation from P_0 e^(k I_f_e t) with absorption off"});
    }

    // Continuity of the piecewise bolus solution at both matching points.
    {
        const FiniteBolus bolus{defaults::S_b, defaults::t_b, defaults::dt_b};
        const double eps = 1e-12;
        double worst = 0.0;
        for (double tb : {bolus.t_b, bolus.t_b + bolus.dt_b}) {
            const double left = riccati_finite_bolus(params, kk, bolus, tb - eps);
            const double right = riccati_finite_bolus(params, kk, bolus, tb);
            worst = std::max(worst, std::abs(left - right) / right);
        }
        results.push_back({"piecewise_continuity", worst <= 1e-9, worst, 1e-9,
                           "relative mismatch across t_b and t_b + dt_b"});
    }

    // Shunted fixed point: numeric steady state vs the mass-balance formula;
    // the printed variant is recorded as divergent.
    {
        SystemParams with_shunt = params;
        with_shunt.shunt = ShuntBlock{defaults::R_s, defaults::P_op, defaults::t_s};
        const ShuntFixedPoint fp = shunted_fixed_point_both(with_shunt);
        EventTimeline tl;
        tl.add(ShuntOnEvent{defaults::R_s, defaults::P_op, defaults::t_s});
        IntegratorConfig cfg;
        cfg.sample_grid = {0.0, 30.0, 60.0};
        const PressureTrace tr =
            integrate(RhsSpec{ComplianceModel{c0}, params, tl}, {0.0, 60.0}, cfg);
        const double err = std::abs(tr.pressures.back() - fp.mass_balance) / fp.mass_balance;
        char note[160];
        std::snprintf(note, sizeof note,
                      "numeric steady state vs mass balance; printed variant %.6g mmH2O diverges "
                      "(below P_op = %g)",
                      fp.printed, defaults::P_op);
        results.push_back({"shunt_fixed_point", err <= 1e-4, err, 1e-4, note});
        const double spread = std::abs(fp.printed - fp.mass_balance);
        results.push_back({"shunt_printed_divergence", spread > 1.0 && fp.printed < defaults::P_op,
                           spread, 1.0,
                           "printed formula must sit well away from the certified fixed point"});
    }

    // Estimation round trips.
    {
        SystemParams from_eq = params;
        from_eq.P_0 = p_eq;
        const double dv = 0.2;
        SampleGrid grid{0.0, 30.0, 0.15};
        PressureTrace tr;
        tr.times = grid.times();
        for (double t : tr.times)
            tr.pressures.push_back(riccati_instant_bolus(from_eq, kk, dv, t));
        BolusFitKnowns knowns;
        knowns.dV = dv;
        const FitReport fit = fit_bolus_response(tr, knowns);
        double k_hat = 0.0, ra_hat = 0.0;
        for (const auto& [n, v] : fit.parameters) {
            if (n == "k") k_hat = v;
            if (n == "R_a") ra_hat = v;
        }
        const double err =
            std::max(std::abs(k_hat - kk) / kk, std::abs(ra_hat - params.R_a) / params.R_a);
        results.push_back({"estimation_round_trip", err <= 0.01, err, 0.01,
                           "worst relative recovery error of (k, R_a) on a noiseless trace"});
    }
    {
        const ComplianceModel model = HyperbolicCompliance{kk};
        std::vector<std::pair<double, double>> pts;
        for (double dv : {-0.5, -0.2, 0.1, 0.4, 0.8})
            pts.emplace_back(dv, pv_relation(model, dv, defaults::P_prime));
        const PviEstimate est = pvi_from_points(pts, defaults::P_prime);
        const double err = std::abs(est.pvi - 1.0 / kk);
        results.push_back({"pvi_round_trip", err <= 1e-9, err, 1e-9,
                           "PVI recovered from pv_relation-generated points"});
    }

    // Figures: deterministic bytes and the qualitative shapes.
    {
        bool identical = true;
        for (int id = 1; id <= 7; ++id)
            identical = identical && figure_to_csv(figure_data(id)) == figure_to_csv(figure_data(id));
        results.push_back({"figures_deterministic", identical, identical ? 0.0 : 1.0, 0.0,
                           "regenerated figure CSVs must be byte-identical"});
    }
    {
        bool ok = true;
        std::string detail = "monotone decay, +/- jumps, plateau, rectangle, recovery";
        const auto f1 = figure_data(1).traces.front();
        for (std::size_t i = 1; i < f1.size(); ++i)
            ok = ok && f1.pressures[i] <= f1.pressures[i - 1] + 1e-12;
        ok = ok && std::abs(f1.pressures.back() - p_eq) / p_eq < 1e-3;
        const auto f4 = figure_data(4).traces.front();
        ok = ok && std::abs(f4.pressures.back() - 246.4) < 0.1;
        const auto f6 = figure_data(6).traces.front();
        for (double v : f6.pressures) ok = ok && (v == 0.0 || v == defaults::S_b);
        const auto f7 = figure_data(7).traces.front();
        ok = ok && f7.pressures.front() == p_eq &&
             std::abs(f7.pressures.back() - p_eq) / p_eq < 1e-2 &&
             *std::min_element(f7.pressures.begin(), f7.pressures.end()) < p_eq - 10.0;
        results.push_back({"figure_shapes", ok, ok ? 0.0 : 1.0, 0.0, detail});
    }

    return results;
}

}  // namespace validation
}  // namespace csf
