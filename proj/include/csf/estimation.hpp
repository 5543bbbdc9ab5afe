#pragma once

/**
 * @file estimation.hpp
 * @brief Inverse problems: PVI from pressure-volume points, bolus-response
 *        parameter recovery, and compliance-model comparison.
 */

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "csf/compliance.hpp"
#include "csf/defaults.hpp"
#include "csf/errors.hpp"
#include "csf/integrator.hpp"
#include "csf/trace.hpp"

namespace csf {

struct PviEstimate {
    double pvi;  // cc per natural-log unit
    double k;    // 1/cc
};

/**
 * @brief Estimate the pressure-volume index from (dV, P) measurements.
 *
 * Least-squares slope through the origin of ln(P/P_ref) versus dV gives k;
 * PVI = 1/k. Exact on data that follows P = P_ref e^(k dV).
 *
 * @throws RankDeficiencyError when all dV coincide (no volume variation).
 */
inline PviEstimate pvi_from_points(const std::vector<std::pair<double, double>>& points,
                                   double p_ref) {
    if (points.size() < 2)
        throw InsufficientDataError("pvi_from_points: need at least 2 points");
    if (!(p_ref > 0.0)) throw std::domain_error("pvi_from_points: P_ref must be > 0");
    bool all_equal = true;
    for (const auto& [dv, p] : points) {
        if (!(p > 0.0)) throw std::domain_error("pvi_from_points: pressures must be > 0");
        if (dv != points.front().first) all_equal = false;
    }
    if (all_equal)
        throw RankDeficiencyError("pvi_from_points: all dV equal; slope is undetermined");

    double sxy = 0.0, sxx = 0.0;
    for (const auto& [dv, p] : points) {
        sxy += dv * std::log(p / p_ref);
        sxx += dv * dv;
    }
    const double k = sxy / sxx;
    if (!(std::abs(k) > std::numeric_limits<double>::min()))
        throw RankDeficiencyError("pvi_from_points: zero slope; PVI is undetermined");
    return {1.0 / k, k};
}

struct FitReport {
    std::string model;
    std::vector<std::pair<std::string, double>> parameters;
    double rss = 0.0;
    int iterations = 0;
    double final_step_norm = 0.0;
    bool converged = false;
    std::string note;
    // Relative per-parameter recovery errors, filled by with_ground_truth()
    // when the generating values are known.
    std::vector<std::pair<std::string, double>> recovery_errors;
};

/// Attach per-parameter recovery errors |estimate - truth| / |truth| for the
/// parameters named in `truth`.
inline FitReport with_ground_truth(FitReport report,
                                   const std::vector<std::pair<std::string, double>>& truth) {
    for (const auto& [name, true_value] : truth) {
        for (const auto& [fit_name, fit_value] : report.parameters)
            if (fit_name == name) {
                const double denom = std::abs(true_value) > 0.0 ? std::abs(true_value) : 1.0;
                report.recovery_errors.emplace_back(name,
                                                    std::abs(fit_value - true_value) / denom);
                break;
            }
    }
    return report;
}

namespace detail {

struct LmOptions {
    int max_iterations = 200;
    double step_tol = 1e-10;   // relative step norm for convergence
    double fd_step = 1e-7;     // forward-difference step in parameter space
    double lambda0 = 1e-3;
};

struct LmResult {
    std::vector<double> theta;
    double rss = 0.0;
    int iterations = 0;
    double final_step_norm = 0.0;
    bool converged = false;
};

/// Solve (A + lambda diag(A)) x = -g for small dense systems. A parameter
/// whose Jacobian column has vanished (no leverage left, e.g. a shift
/// collapsing to zero) is frozen for this step rather than treated as fatal;
/// only a fully information-free system raises RankDeficiencyError.
inline std::vector<double> solve_damped(std::vector<std::vector<double>> A, std::vector<double> g,
                                        double lambda) {
    const std::size_t n = g.size();
    double largest = 0.0;
    for (std::size_t i = 0; i < n; ++i) largest = std::max(largest, A[i][i]);
    if (!(largest > 0.0))
        throw RankDeficiencyError("normal equations are singular: no parameter has leverage "
                                  "on the data");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(A[i][i] > largest * 1e-14)) {
            for (std::size_t c = 0; c < n; ++c) {
                A[i][c] = 0.0;
                A[c][i] = 0.0;
            }
            A[i][i] = largest;
            g[i] = 0.0;
        }
        A[i][i] *= 1.0 + lambda;
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = -g[i];
    // Gaussian elimination with partial pivoting; systems here are 1x1..4x4.
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-300)
            throw RankDeficiencyError("normal equations are singular");
        std::swap(A[col], A[piv]);
        std::swap(x[col], x[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = A[r][col] / A[col][col];
            for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            x[r] -= f * x[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t c = i + 1; c < n; ++c) x[i] -= A[i][c] * x[c];
        x[i] /= A[i][i];
    }
    return x;
}

/// Damped Gauss-Newton (Levenberg style) over an arbitrary residual function.
/// Residual evaluations that throw are treated as rejected steps.
inline LmResult levenberg_marquardt(
    const std::function<std::vector<double>(const std::vector<double>&)>& residuals,
    std::vector<double> theta, const LmOptions& opt = {}) {
    auto rss_of = [](const std::vector<double>& r) {
        double s = 0.0;
        for (double v : r) s += v * v;
        return s;
    };

    LmResult result;
    std::vector<double> r = residuals(theta);
    double rss = rss_of(r);
    double lambda = opt.lambda0;
    const std::size_t n = theta.size();

    for (int iter = 1; iter <= opt.max_iterations; ++iter) {
        result.iterations = iter;

        // Forward-difference Jacobian.
        std::vector<std::vector<double>> J(r.size(), std::vector<double>(n));
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<double> th = theta;
            const double h = opt.fd_step * std::max(1.0, std::abs(th[j]));
            th[j] += h;
            const std::vector<double> rj = residuals(th);
            for (std::size_t i = 0; i < r.size(); ++i) J[i][j] = (rj[i] - r[i]) / h;
        }
        std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
        std::vector<double> g(n, 0.0);
        for (std::size_t i = 0; i < r.size(); ++i)
            for (std::size_t a = 0; a < n; ++a) {
                g[a] += J[i][a] * r[i];
                for (std::size_t b = a; b < n; ++b) A[a][b] += J[i][a] * J[i][b];
            }
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < a; ++b) A[a][b] = A[b][a];

        bool accepted = false;
        for (int tries = 0; tries < 25 && !accepted; ++tries) {
            std::vector<double> step;
            try {
                step = solve_damped(A, g, lambda);
            } catch (const RankDeficiencyError&) {
                if (lambda > 1e10) throw;
                lambda *= 3.0;
                continue;
            }
            std::vector<double> th = theta;
            for (std::size_t j = 0; j < n; ++j) th[j] += step[j];
            std::vector<double> r_new;
            double rss_new = std::numeric_limits<double>::infinity();
            try {
                r_new = residuals(th);
                rss_new = rss_of(r_new);
            } catch (const std::exception&) {
                // step left the feasible region; damp harder
            }
            if (rss_new <= rss) {
                double sn = 0.0, tn = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    sn += step[j] * step[j];
                    tn += theta[j] * theta[j];
                }
                result.final_step_norm = std::sqrt(sn) / std::max(1.0, std::sqrt(tn));
                theta = std::move(th);
                r = std::move(r_new);
                rss = rss_new;
                lambda = std::max(lambda * 0.3, 1e-12);
                accepted = true;
            } else {
                lambda *= 3.0;
            }
        }
        if (!accepted || result.final_step_norm < opt.step_tol) {
            result.converged = accepted || rss == 0.0;
            break;
        }
    }
    result.theta = std::move(theta);
    result.rss = rss;
    if (result.final_step_norm < opt.step_tol) result.converged = true;
    return result;
}

inline void require_informative(const PressureTrace& trace) {
    trace.validate();
    if (trace.size() < 5)
        throw InsufficientDataError("fit: need at least 5 samples");
    double lo = trace.pressures.front(), hi = lo, mean = 0.0;
    for (double p : trace.pressures) {
        if (!(p > 0.0)) throw std::domain_error("fit: pressures must be positive");
        lo = std::min(lo, p);
        hi = std::max(hi, p);
        mean += p;
    }
    mean /= static_cast<double>(trace.size());
    if ((hi - lo) / mean < 1e-12)
        throw RankDeficiencyError("fit: trace is flat; no transient information");
}

}  // namespace detail

/// Knowns for the bolus-response fit. The injected volume is the
/// experimenter's input and is always required; any of the model parameters
/// may additionally be pinned.
struct BolusFitKnowns {
    double dV = 0.0;  // cc, signed
    std::optional<double> k;
    std::optional<double> R_a;
    std::optional<double> P_eq;
};

/**
 * @brief Fit the post-bolus relaxation
 *        P(t) = P_eq / (1 + (e^(-k dV) - 1) e^(-(k P_eq / R_a) t))
 *        to a trace whose time origin is the bolus instant.
 *
 * Free parameters (those not pinned in knowns) are optimized in log space,
 * which enforces positivity. Initial guesses: k from the endpoint pressure
 * ratio, R_a from the default 600, P_eq from the last sample.
 */
inline FitReport fit_bolus_response(const PressureTrace& trace, const BolusFitKnowns& knowns) {
    detail::require_informative(trace);
    if (knowns.dV == 0.0)
        throw RankDeficiencyError("fit_bolus_response: dV = 0 carries no bolus information");

    const double p_first = trace.pressures.front();
    const double p_last = trace.pressures.back();
    double k0 = knowns.k.value_or(0.0);
    if (!knowns.k) {
        const double ratio = p_first / p_last;
        k0 = ratio > 0.0 ? std::log(ratio) / knowns.dV : defaults::k;
        if (!(k0 > 0.0) || !std::isfinite(k0)) k0 = defaults::k;
    }
    const double ra0 = knowns.R_a.value_or(defaults::R_a);
    const double peq0 = knowns.P_eq.value_or(p_last);

    // Pack the free parameters, log-transformed.
    std::vector<std::string> free_names;
    std::vector<double> theta;
    if (!knowns.k) { free_names.emplace_back("k"); theta.push_back(std::log(k0)); }
    if (!knowns.R_a) { free_names.emplace_back("R_a"); theta.push_back(std::log(ra0)); }
    if (!knowns.P_eq) { free_names.emplace_back("P_eq"); theta.push_back(std::log(peq0)); }
    if (theta.empty())
        throw std::invalid_argument("fit_bolus_response: all parameters fixed, nothing to fit");

    auto unpack = [&](const std::vector<double>& th, double& k, double& ra, double& peq) {
        std::size_t j = 0;
        k = knowns.k ? *knowns.k : std::exp(th[j++]);
        ra = knowns.R_a ? *knowns.R_a : std::exp(th[j++]);
        peq = knowns.P_eq ? *knowns.P_eq : std::exp(th[j++]);
    };
    // Trace times are measured from the bolus instant, so the model is
    // evaluated at the absolute sample times.
    auto residuals = [&](const std::vector<double>& th) {
        double k, ra, peq;
        unpack(th, k, ra, peq);
        const double jump = std::exp(-k * knowns.dV) - 1.0;
        const double rate = k * peq / ra;
        std::vector<double> r(trace.size());
        for (std::size_t i = 0; i < trace.size(); ++i) {
            const double denom = 1.0 + jump * std::exp(-rate * trace.times[i]);
            if (!(denom > 0.0)) throw std::domain_error("bolus model left its domain");
            r[i] = peq / denom - trace.pressures[i];
        }
        return r;
    };

    const detail::LmResult lm = detail::levenberg_marquardt(residuals, theta);

    FitReport report;
    report.model = "bolus_response";
    double k, ra, peq;
    unpack(lm.theta, k, ra, peq);
    report.parameters = {{"k", k}, {"R_a", ra}, {"P_eq", peq}};
    report.rss = lm.rss;
    report.iterations = lm.iterations;
    report.final_step_norm = lm.final_step_norm;
    report.converged = lm.converged;
    if (!lm.converged) report.note = "not converged within the iteration cap";
    return report;
}

struct CompareOptions {
    SystemParams params = defaults::params();  // R_a, I_f_e, P_d used by the engine
    IntegratorConfig integrator;
};

/**
 * @brief Fit each candidate compliance law to a relaxation trace through the
 *        numerical engine and rank the reports by residual sum of squares.
 *
 * Candidates double as initial guesses: the law's parameter values seed the
 * optimizer. A candidate whose fit throws is kept in the ranking (last) with
 * the error in its note.
 */
inline std::vector<FitReport> compare_models(const PressureTrace& trace,
                                             const std::vector<ComplianceModel>& candidates,
                                             const CompareOptions& options = {}) {
    if (candidates.empty()) throw std::invalid_argument("compare_models: no candidates");
    detail::require_informative(trace);

    SystemParams params = options.params;
    params.P_0 = trace.pressures.front();

    auto simulate = [&](const ComplianceModel& model) {
        IntegratorConfig cfg = options.integrator;
        cfg.sample_grid = trace.times;
        const RhsSpec rhs{model, params, EventTimeline{}};
        return integrate(rhs, {trace.times.front(), trace.times.back()}, cfg);
    };

    std::vector<FitReport> reports;
    for (const ComplianceModel& candidate : candidates) {
        FitReport report;
        report.model = model_name(candidate);
        try {
            validate(candidate);
            std::vector<std::string> names;
            std::vector<double> theta;
            std::visit(
                [&](const auto& m) {
                    using M = std::decay_t<decltype(m)>;
                    if constexpr (std::is_same_v<M, ConstantCompliance>) {
                        names = {"C_0"};
                        theta = {std::log(m.C0)};
                    } else if constexpr (std::is_same_v<M, HyperbolicCompliance>) {
                        names = {"k"};
                        theta = {std::log(m.k)};
                    } else if constexpr (std::is_same_v<M, ShiftedHyperbolicCompliance>) {
                        names = {"k_1", "k_2"};
                        theta = {std::log(m.k1), std::log(m.k2)};
                    } else {
                        names = {"a", "b"};
                        theta = {std::log(m.a), std::log(std::max(m.b, 1e-12))};
                    }
                },
                candidate);

            auto rebuild = [&](const std::vector<double>& th) -> ComplianceModel {
                if (names[0] == "C_0") return ConstantCompliance{std::exp(th[0])};
                if (names[0] == "k") return HyperbolicCompliance{std::exp(th[0])};
                if (names[0] == "k_1")
                    return ShiftedHyperbolicCompliance{std::exp(th[0]), std::exp(th[1])};
                return ExponentialCompliance{std::exp(th[0]), std::exp(th[1])};
            };
            auto residuals = [&](const std::vector<double>& th) {
                const PressureTrace sim = simulate(rebuild(th));
                std::vector<double> r(trace.size());
                for (std::size_t i = 0; i < trace.size(); ++i)
                    r[i] = sim.pressures[i] - trace.pressures[i];
                return r;
            };

            detail::LmOptions opt;
            opt.fd_step = 1e-5;  // coarser differencing on top of the integrator tolerance
            const detail::LmResult lm = detail::levenberg_marquardt(residuals, theta, opt);
            for (std::size_t j = 0; j < names.size(); ++j)
                report.parameters.emplace_back(names[j], std::exp(lm.theta[j]));
            report.rss = lm.rss;
            report.iterations = lm.iterations;
            report.final_step_norm = lm.final_step_norm;
            report.converged = lm.converged;
            if (!lm.converged) report.note = "not converged within the iteration cap";
        } catch (const std::exception& e) {
            report.converged = false;
            report.rss = std::numeric_limits<double>::infinity();
            report.note = e.what();
        }
        reports.push_back(std::move(report));
    }
    std::stable_sort(reports.begin(), reports.end(),
                     [](const FitReport& a, const FitReport& b) { return a.rss < b.rss; });
    return reports;
}

}  // namespace csf
