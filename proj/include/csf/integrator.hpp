#pragma once

/**
 * @file integrator.hpp
 * @brief Event-aware adaptive integrator for the pressure balance
 *        C(P) dP/dt + P/R_a = I_f(t) + P_d/R_a and its gated/shunted variants.
 *
 * Dormand-Prince 5(4) with step-size control. Integration restarts at every
 * timeline breakpoint so a discontinuous source never straddles a step, and
 * instantaneous boluses are applied as state jumps through the model's
 * pressure-volume relation. Samples are produced exactly at the requested
 * grid times (steps are clamped to land on them), so sample accuracy is set
 * by the tolerances alone.
 *
 * This engine is the brute-force oracle for the closed forms in
 * analytic.hpp and deliberately shares no formulas with them.
 */

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "csf/compliance.hpp"
#include "csf/errors.hpp"
#include "csf/params.hpp"
#include "csf/timeline.hpp"
#include "csf/trace.hpp"

namespace csf {

struct IntegratorConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;  // mmH2O
    double max_step = 1.0;   // min
    std::vector<double> sample_grid;  // output times; uniform 0.05 min grid if empty

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw std::invalid_argument("IntegratorConfig: tolerances must be positive");
        if (!(max_step > 0.0)) throw std::invalid_argument("IntegratorConfig: max_step must be > 0");
    }
};

/// Right-hand side specification: compliance law, circuit constants, and the
/// event timeline. The absorption-gate flag mirrors the timeline.
struct RhsSpec {
    ComplianceModel compliance;
    SystemParams params;
    EventTimeline timeline;
    bool absorption_gated = false;

    RhsSpec(ComplianceModel model, SystemParams p, EventTimeline tl = {})
        : compliance(std::move(model)), params(std::move(p)), timeline(std::move(tl)) {
        params.validate();
        validate(compliance);
        absorption_gated = timeline.gate().has_value();
    }

    /// Net volume rate divided by compliance: dP/dt at (t, P).
    double operator()(double t, double P) const {
        double net = params.I_f_e + timeline.source_at(t);
        const bool absorbing = !absorption_gated || t >= timeline.gate()->t_a;
        if (absorbing) net -= (P - params.P_d) / params.R_a;
        if (const auto sh = timeline.shunt(); sh && t >= sh->t_s)
            net -= (P - sh->P_op) / sh->R_s;
        return net / compliance_at(compliance, P);
    }
};

namespace detail {

inline bool pressure_in_domain(const ComplianceModel& model, double P) {
    return std::isfinite(P) && std::visit(
                                   [P](const auto& m) {
                                       using M = std::decay_t<decltype(m)>;
                                       if constexpr (std::is_same_v<M, HyperbolicCompliance>)
                                           return P >= kMinHyperbolicPressure;
                                       else if constexpr (std::is_same_v<M, ShiftedHyperbolicCompliance>)
                                           return P > 0.0;
                                       else
                                           return P >= 0.0;
                                   },
                                   model);
}

/// Throws SingularityError when P leaves the compliance domain at time t.
inline void check_pressure_domain(const ComplianceModel& model, double P, double t) {
    if (!pressure_in_domain(model, P))
        throw SingularityError("pressure " + std::to_string(P) +
                                   " mmH2O left the compliance domain at t = " + std::to_string(t) +
                                   " min",
                               t);
}

// Dormand-Prince 5(4) tableau.
inline constexpr double dp_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
inline constexpr double dp_e[7] = {71.0 / 57600,      0.0,          -71.0 / 16695, 71.0 / 1920,
                                   -17253.0 / 339200, 22.0 / 525,   -1.0 / 40};

/// Advance (t, y) to exactly t_stop with adaptive steps.
template <typename Rhs>
void advance_to(const Rhs& rhs, const ComplianceModel& model, double& t, double& y, double t_stop,
                const IntegratorConfig& cfg) {
    double h = std::min(cfg.max_step, t_stop - t);
    while (t < t_stop) {
        // Stops one rounding error apart (a sample time next to an event
        // time) are snapped, not integrated across.
        if (t_stop - t <= 1e-13 * std::max(1.0, std::abs(t_stop))) break;
        h = std::min(h, t_stop - t);
        if (h < 1e-14 * std::max(1.0, std::abs(t)))
            throw SingularityError("step size collapsed at t = " + std::to_string(t) + " min", t);

        double k[7];
        check_pressure_domain(model, y, t);
        k[0] = rhs(t, y);
        // A trial step whose stages leave the domain is rejected and retried
        // smaller; only the accepted state is allowed to fail fatally.
        bool stages_ok = true;
        for (int s = 1; s < 7 && stages_ok; ++s) {
            double acc = 0.0;
            for (int j = 0; j < s; ++j) acc += dp_a[s][j] * k[j];
            const double ys = y + h * acc;
            if (!pressure_in_domain(model, ys)) {
                stages_ok = false;
                break;
            }
            k[s] = rhs(t + dp_c[s] * h, ys);
        }
        if (!stages_ok) {
            h *= 0.5;
            continue;
        }
        // Fifth-order solution uses the last tableau row; k[6] is its slope.
        double y5 = y;
        for (int j = 0; j < 6; ++j) y5 += h * dp_a[6][j] * k[j];
        double err = 0.0;
        for (int j = 0; j < 7; ++j) err += dp_e[j] * k[j];
        err = std::abs(h * err);

        if (!pressure_in_domain(model, y5) || !std::isfinite(err)) {
            h *= 0.5;
            continue;
        }
        const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y), std::abs(y5));
        const double ratio = err / scale;
        if (ratio <= 1.0) {
            t += h;
            y = y5;
            const double grow = ratio > 0.0 ? 0.9 * std::pow(ratio, -0.2) : 5.0;
            h *= std::clamp(grow, 0.2, 5.0);
            h = std::min(h, cfg.max_step);
        } else {
            h *= std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 1.0);
        }
    }
    t = t_stop;
}

}  // namespace detail

/**
 * @brief Integrate the pressure ODE over t_span and sample it on the grid.
 *
 * @throws SingularityError on step-size collapse or when the pressure leaves
 *         the compliance domain, carrying the failure time.
 */
inline PressureTrace integrate(const RhsSpec& rhs, std::pair<double, double> t_span,
                               const IntegratorConfig& config = {}) {
    config.validate();
    const double t0 = t_span.first;
    const double t1 = t_span.second;
    if (!(std::isfinite(t0) && std::isfinite(t1) && t1 > t0))
        throw std::invalid_argument("integrate: t_span must be finite with t1 > t0");

    std::vector<double> grid = config.sample_grid;
    if (grid.empty()) {
        const double dt = 0.05;
        const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / dt + 0.5));
        grid.reserve(n + 1);
        for (std::size_t i = 0; i <= n; ++i) grid.push_back(t0 + static_cast<double>(i) * dt);
        if (grid.back() > t1) grid.back() = t1;
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < t0 || grid[i] > t1)
            throw std::invalid_argument("integrate: sample grid leaves t_span");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw std::invalid_argument("integrate: sample grid not strictly increasing");
    }

    // Stop at every sample, every breakpoint, and every jump time.
    std::vector<double> stops = grid;
    for (double b : rhs.timeline.breakpoints())
        if (b > t0 && b <= t1) stops.push_back(b);
    stops.push_back(t1);
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

    PressureTrace trace;
    trace.provenance = Provenance::numeric;
    trace.times.reserve(grid.size());
    trace.pressures.reserve(grid.size());

    double t = t0;
    double y = rhs.params.P_0;
    detail::check_pressure_domain(rhs.compliance, y, t);

    auto apply_jumps = [&](double at) {
        for (double dv : rhs.timeline.jumps_at(at)) {
            y = pv_relation(rhs.compliance, dv, y);
            detail::check_pressure_domain(rhs.compliance, y, at);
        }
    };
    auto record_if_sampled = [&](double at) {
        if (std::binary_search(grid.begin(), grid.end(), at)) {
            trace.times.push_back(at);
            trace.pressures.push_back(y);
        }
    };

    apply_jumps(t0);
    record_if_sampled(t0);
    for (double stop : stops) {
        if (stop <= t0) continue;
        detail::advance_to(rhs, rhs.compliance, t, y, stop, config);
        apply_jumps(stop);
        record_if_sampled(stop);
    }

    trace.validate();
    return trace;
}

struct ResidualReport {
    double max_residual = 0.0;  // mmH2O/min
    double at_time = 0.0;
    std::size_t samples_checked = 0;
};

/**
 * @brief Verify a trace against the ODE: max over interior samples of
 *        |centered-difference dP/dt - RHS(P, t)|.
 *
 * Samples within two indices of a timeline breakpoint are excluded (the
 * derivative is discontinuous there). Every smooth segment of the trace must
 * contain at least five samples.
 */
inline ResidualReport residual_check(const PressureTrace& trace, const RhsSpec& rhs) {
    trace.validate();
    const std::size_t n = trace.size();
    if (n < 5) throw InsufficientDataError("residual_check: need at least 5 samples");

    std::vector<double> breaks;
    for (double b : rhs.timeline.breakpoints())
        if (b > trace.times.front() && b < trace.times.back()) breaks.push_back(b);

    // Segment sample counts between consecutive breakpoints.
    {
        std::vector<double> edges = {trace.times.front()};
        edges.insert(edges.end(), breaks.begin(), breaks.end());
        edges.push_back(trace.times.back());
        for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
            const auto lo = std::lower_bound(trace.times.begin(), trace.times.end(), edges[s]);
            const auto hi = std::upper_bound(trace.times.begin(), trace.times.end(), edges[s + 1]);
            if (hi - lo < 5)
                throw InsufficientDataError(
                    "residual_check: smooth segment starting at t = " + std::to_string(edges[s]) +
                    " min has fewer than 5 samples");
        }
    }

    std::vector<bool> excluded(n, false);
    for (double b : breaks) {
        const auto it = std::lower_bound(trace.times.begin(), trace.times.end(), b);
        const auto j = static_cast<std::ptrdiff_t>(it - trace.times.begin());
        for (std::ptrdiff_t i = j - 2; i <= j + 2; ++i)
            if (i >= 0 && i < static_cast<std::ptrdiff_t>(n)) excluded[static_cast<std::size_t>(i)] = true;
    }

    ResidualReport report;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (excluded[i]) continue;
        const double slope =
            (trace.pressures[i + 1] - trace.pressures[i - 1]) / (trace.times[i + 1] - trace.times[i - 1]);
        const double r = std::abs(slope - rhs(trace.times[i], trace.pressures[i]));
        ++report.samples_checked;
        if (r > report.max_residual) {
            report.max_residual = r;
            report.at_time = trace.times[i];
        }
    }
    if (report.samples_checked == 0)
        throw InsufficientDataError("residual_check: no interior samples left after exclusions");
    return report;
}

}  // namespace csf
