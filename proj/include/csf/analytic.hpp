#pragma once

/**
 * @file analytic.hpp
 * @brief Closed-form pressure solutions.
 *
 * Two families are covered, both for the single-compartment balance
 *   C(P) dP/dt + P/R_a = I_f(t) + P_d/R_a :
 *
 *  - constant compliance (linear ODE): no source, impulse bolus, constant
 *    infusion, shunt;
 *  - hyperbolic compliance C = 1/(kP) (Riccati ODE, linearized by P = 1/p):
 *    no source, finite-duration bolus with piecewise matching, instantaneous
 *    bolus, gated growth with absorption off, constant infusion.
 *
 * Every function here is certified against the numerical engine by the test
 * suite; none of them is used inside the engine itself.
 */

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

#include "csf/errors.hpp"
#include "csf/params.hpp"

namespace csf {

/// Unit step, 1 for x >= 0.
inline double heaviside(double x) { return x >= 0.0 ? 1.0 : 0.0; }

// ---------------------------------------------------------------------------
// Linear family (constant compliance)
// ---------------------------------------------------------------------------

struct NoSourceLinear {};

/// Instantaneous pressure pulse of size P_bar = S_0/C0 at time t_0.
struct ImpulseBolus {
    double P_bar;  // mmH2O, signed
    double t_0;    // min
};

struct ConstantInfusionLinear {
    double S_i;  // cc/min
    double R_i;  // mmH2O/(ml/min)
    double t_i;  // min
};

struct ShuntLinear {
    double R_s;   // mmH2O/(ml/min)
    double P_op;  // mmH2O
    double t_s;   // min
};

using LinearScenario =
    std::variant<NoSourceLinear, ImpulseBolus, ConstantInfusionLinear, ShuntLinear>;

/**
 * @brief Closed-form pressure of the linear model family at time t.
 *
 * No source:    P_eq + (P_0 - P_eq) e^(-nu_a t)
 * Impulse:      adds P_bar H(t - t_0) e^(-nu_a (t - t_0))
 * Infusion:     adds R_a S_i (1 - e^(-nu_a (t - t_i))) H(t - t_i)
 * Shunt:        for t >= t_s, relaxation at rate nu_a + nu_s toward the
 *               mass-balance fixed point, continuous at t_s.
 */
inline double linear_solve(const LinearScenario& scenario, const SystemParams& params,
                           const ConstantCompliance& compliance, double t) {
    params.validate();
    validate(ComplianceModel{compliance});
    if (t < 0.0) throw std::domain_error("linear_solve: t must be >= 0");

    const double p_eq = equilibrium_pressure(params);
    const double nu_a = 1.0 / (compliance.C0 * params.R_a);
    const double base = p_eq + (params.P_0 - p_eq) * std::exp(-nu_a * t);

    struct Visitor {
        const SystemParams& params;
        double C0, p_eq, nu_a, base, t;

        double operator()(const NoSourceLinear&) const { return base; }
        double operator()(const ImpulseBolus& s) const {
            return base + s.P_bar * heaviside(t - s.t_0) * std::exp(-nu_a * (t - s.t_0));
        }
        double operator()(const ConstantInfusionLinear& s) const {
            if (t < s.t_i) return base;
            // (nu_i/nu_a) P_i == R_a S_i
            return base + params.R_a * s.S_i * (1.0 - std::exp(-nu_a * (t - s.t_i)));
        }
        double operator()(const ShuntLinear& s) const {
            if (t < s.t_s) return base;
            const double nu_s = 1.0 / (C0 * s.R_s);
            const double fixed = (nu_a * p_eq + nu_s * s.P_op) / (nu_a + nu_s);
            const double at_ts = p_eq + (params.P_0 - p_eq) * std::exp(-nu_a * s.t_s);
            return fixed + (at_ts - fixed) * std::exp(-(nu_a + nu_s) * (t - s.t_s));
        }
    };
    return std::visit(Visitor{params, compliance.C0, p_eq, nu_a, base, t}, scenario);
}

// ---------------------------------------------------------------------------
// Riccati family (hyperbolic compliance)
// ---------------------------------------------------------------------------

/// Rectangle source: rate S_b over [t_b, t_b + dt_b]. S_b < 0 withdraws.
struct FiniteBolus {
    double S_b;   // cc/min
    double t_b;   // min
    double dt_b;  // min, > 0
};

/// Relaxation from P_0 with no external source:
/// P(t) = P_eq / (1 + (P_eq/P_0 - 1) e^(-alpha P_eq t)).
inline double riccati_no_source(const SystemParams& params, double k, double P_0, double t) {
    params.validate();
    if (!(k > 0.0)) throw std::invalid_argument("riccati_no_source: k must be > 0");
    if (!(P_0 > 0.0)) throw std::domain_error("riccati_no_source: P_0 must be > 0");
    if (t < 0.0) throw std::domain_error("riccati_no_source: t must be >= 0");
    const double p_eq = equilibrium_pressure(params);
    const double alpha = k / params.R_a;
    const double denom = 1.0 + (p_eq / P_0 - 1.0) * std::exp(-alpha * p_eq * t);
    if (!(denom > 0.0))
        throw SingularityError("riccati_no_source: pressure blow-up at t = " + std::to_string(t), t);
    return p_eq / denom;
}

/**
 * @brief Piecewise solution for a finite-duration bolus.
 *
 * Three segments matched continuously at t_b and t_b + dt_b. In the
 * substituted variable p = 1/P, with
 *   P_b = P_eq + R_a S_b,  nu_b = alpha P_b,  nu_b' = alpha R_a S_b,
 * the middle segment reads
 *   p(t) = (1/P_eq)[(1 - P_eq/P_b) e^(nu_b t_b)
 *                   - (1 - P_eq/P_0) e^(nu_b' t_b)] e^(-nu_b t) + 1/P_b
 * and the tail segment
 *   p(t) = c e^(-(nu_b - nu_b') t) + 1/P_eq
 * with the matching constant evaluated at t_b + dt_b. Note nu_b - nu_b' =
 * alpha P_eq, the no-source relaxation rate.
 *
 * @throws SingularityError if the parameters drive p(t) through zero
 *         (pressure blow-up), reporting the offending time.
 */
inline double riccati_finite_bolus(const SystemParams& params, double k, const FiniteBolus& bolus,
                                   double t) {
    params.validate();
    if (!(k > 0.0)) throw std::invalid_argument("riccati_finite_bolus: k must be > 0");
    if (!(bolus.dt_b > 0.0))
        throw std::invalid_argument("riccati_finite_bolus: dt_b must be > 0");
    if (bolus.t_b < 0.0) throw std::invalid_argument("riccati_finite_bolus: t_b must be >= 0");
    if (t < 0.0) throw std::domain_error("riccati_finite_bolus: t must be >= 0");

    const double p_eq = equilibrium_pressure(params);
    const double alpha = k / params.R_a;
    const double P_0 = params.P_0;
    const double P_b = p_eq + params.R_a * bolus.S_b;
    // P_b < 0 (strong withdrawal) is a valid regime; only the resonant
    // P_b ~ 0 breaks the closed form's partial-fraction structure.
    if (std::abs(P_b) < 1e-9)
        throw SingularityError("riccati_finite_bolus: P_eq + R_a S_b is zero; the bolus-window "
                               "solution degenerates",
                               bolus.t_b);
    const double nu_b = alpha * P_b;
    const double nu_bp = alpha * params.R_a * bolus.S_b;
    const double t_on = bolus.t_b;
    const double t_off = bolus.t_b + bolus.dt_b;

    double p;  // reciprocal pressure
    if (t < t_on) {
        p = 1.0 / p_eq + (1.0 / P_0 - 1.0 / p_eq) * std::exp(-alpha * p_eq * t);
    } else if (t < t_off) {
        const double bracket = (1.0 - p_eq / P_b) * std::exp(nu_b * t_on) -
                               (1.0 - p_eq / P_0) * std::exp(nu_bp * t_on);
        p = (bracket / p_eq) * std::exp(-nu_b * t) + 1.0 / P_b;
    } else {
        const double bracket = (1.0 - p_eq / P_b) * std::exp(nu_b * t_on) -
                               (1.0 - p_eq / P_0) * std::exp(nu_bp * t_on);
        const double c = (1.0 / P_b - 1.0 / p_eq) * std::exp((nu_b - nu_bp) * t_off) +
                         (bracket / p_eq) * std::exp(-nu_bp * t_off);
        p = c * std::exp(-(nu_b - nu_bp) * t) + 1.0 / p_eq;
    }
    if (!(p > 0.0) || !std::isfinite(p))
        throw SingularityError("riccati_finite_bolus: pressure blow-up at t = " + std::to_string(t),
                               t);
    return 1.0 / p;
}

/**
 * @brief Relaxation after an instantaneous bolus of volume dV applied at
 *        equilibrium.
 *
 * P(0) = P_eq e^(k dV); P(t) = P_eq / (1 + (e^(-k dV) - 1) e^(-alpha P_eq t)).
 * Only valid after the jump: the formula describes the relaxation, not the
 * loading phase.
 */
inline double riccati_instant_bolus(const SystemParams& params, double k, double delta_v,
                                    double t) {
    params.validate();
    if (!(k > 0.0)) throw std::invalid_argument("riccati_instant_bolus: k must be > 0");
    if (t < 0.0) throw std::domain_error("riccati_instant_bolus: t must be >= 0");
    const double p_eq = equilibrium_pressure(params);
    const double alpha = k / params.R_a;
    const double denom = 1.0 + (std::exp(-k * delta_v) - 1.0) * std::exp(-alpha * p_eq * t);
    if (!(denom > 0.0))
        throw SingularityError("riccati_instant_bolus: pressure blow-up at t = " + std::to_string(t),
                               t);
    return p_eq / denom;
}

/**
 * @brief Growth regime after a withdrawal large enough to shut absorption off.
 *
 * Starting from P_0 = P_eq e^(-k dV_withdrawn), while absorption is gated off
 * (t < t_a) the pressure grows as P(t) = P_0 e^(k I_f_e t).
 *
 * @throws OutOfRegimeError for t >= t_a; the caller must switch to the
 *         absorbing solution there.
 */
inline double riccati_gated_growth(const SystemParams& params, double k, double delta_v_withdrawn,
                                   double t_a, double t) {
    params.validate();
    if (!(k > 0.0)) throw std::invalid_argument("riccati_gated_growth: k must be > 0");
    if (delta_v_withdrawn < 0.0)
        throw std::invalid_argument("riccati_gated_growth: withdrawal volume must be >= 0");
    if (t < 0.0) throw std::domain_error("riccati_gated_growth: t must be >= 0");
    if (t >= t_a)
        throw OutOfRegimeError("riccati_gated_growth: t = " + std::to_string(t) +
                               " >= t_a = " + std::to_string(t_a) +
                               "; absorption is active, use the absorbing solution");
    const double p_eq = equilibrium_pressure(params);
    const double P_0 = p_eq * std::exp(-k * delta_v_withdrawn);
    return P_0 * std::exp(k * params.I_f_e * t);
}

/**
 * @brief Constant infusion started at t_i from equilibrium.
 *
 * P(t) = P_eq for t < t_i; afterwards, with tau = t - t_i,
 * P = (P_eq + R_a S_i) / (1 + (R_a S_i / P_eq) e^(-alpha (P_eq + R_a S_i) tau)),
 * approaching the steady state P_eq + R_a S_i.
 */
inline double riccati_infusion(const SystemParams& params, double k, double S_i, double t_i,
                               double t) {
    params.validate();
    if (!(k > 0.0)) throw std::invalid_argument("riccati_infusion: k must be > 0");
    if (S_i < 0.0) throw std::invalid_argument("riccati_infusion: S_i must be >= 0");
    if (t < 0.0) throw std::domain_error("riccati_infusion: t must be >= 0");
    const double p_eq = equilibrium_pressure(params);
    if (t < t_i) return p_eq;
    const double alpha = k / params.R_a;
    const double p_ss = p_eq + params.R_a * S_i;
    const double tau = t - t_i;
    return p_ss / (1.0 + (params.R_a * S_i / p_eq) * std::exp(-alpha * p_ss * tau));
}

}  // namespace csf
