#pragma once

/**
 * @file params.hpp
 * @brief Fluid-circuit constants of the CSF compartment and the closed-form
 *        equilibrium / steady-state pressures they imply.
 */

#include <cmath>
#include <optional>
#include <stdexcept>

#include "csf/compliance.hpp"
#include "csf/errors.hpp"

namespace csf {

/// One-way valve diverting CSF above the opening pressure.
struct ShuntBlock {
    double R_s;   // valve resistance [mmH2O/(ml/min)]
    double P_op;  // opening pressure [mmH2O]
    double t_s;   // activation time [min]
};

/// Constant-rate infusion through an apparatus of resistance R_i.
struct InfusionBlock {
    double R_i;  // apparatus resistance [mmH2O/(ml/min)]
    double S_i;  // infusion rate [cc/min]
    double t_i;  // start time [min]
};

/// Circuit constants shared by every model in the family.
struct SystemParams {
    double R_a = 0.0;    // absorption resistance [mmH2O/(ml/min)]
    double I_f_e = 0.0;  // equilibrium CSF formation rate [cc/min]
    double P_d = 0.0;    // dural sinus threshold pressure [mmH2O]
    double P_0 = 0.0;    // initial pressure [mmH2O]
    std::optional<ShuntBlock> shunt;
    std::optional<InfusionBlock> infusion;
    std::optional<double> t_a;  // absorption-gate time [min]

    void validate() const {
        if (!(R_a > 0.0)) throw std::invalid_argument("SystemParams: R_a must be > 0");
        if (I_f_e < 0.0) throw std::invalid_argument("SystemParams: I_f_e must be >= 0");
        if (!(P_0 > 0.0)) throw std::invalid_argument("SystemParams: P_0 must be > 0");
        if (shunt) {
            if (shunt->R_s < 0.0 || shunt->t_s < 0.0)
                throw std::invalid_argument("SystemParams: shunt resistance/time must be >= 0");
        }
        if (infusion) {
            if (infusion->R_i < 0.0 || infusion->t_i < 0.0)
                throw std::invalid_argument("SystemParams: infusion resistance/time must be >= 0");
        }
        if (t_a && *t_a < 0.0) throw std::invalid_argument("SystemParams: t_a must be >= 0");
    }
};

/// Equilibrium pressure the system relaxes to with no external source:
/// P_eq = R_a * I_f_e + P_d.
inline double equilibrium_pressure(const SystemParams& params) {
    params.validate();
    return params.R_a * params.I_f_e + params.P_d;
}

/**
 * @brief Steady state under constant infusion, P_ss = P_eq + R_a * S_i.
 *
 * The same value can be written P_eq + (nu_i/nu_a) * P_i with P_i = R_i * S_i;
 * both routes are evaluated and must agree to machine precision (they are the
 * same product re-associated). Independence from R_i is a model property.
 *
 * @throws ConfigurationError if no infusion block is present.
 */
inline double infusion_steady_state(const SystemParams& params) {
    params.validate();
    if (!params.infusion)
        throw ConfigurationError("infusion_steady_state: no infusion block configured");
    const double p_eq = equilibrium_pressure(params);
    const double direct = p_eq + params.R_a * params.infusion->S_i;
    if (params.infusion->R_i > 0.0) {
        const double p_i = params.infusion->R_i * params.infusion->S_i;
        const double via_ratio = p_eq + (params.R_a / params.infusion->R_i) * p_i;
        if (std::abs(direct - via_ratio) >
            16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(direct), 1.0))
            throw std::logic_error("infusion_steady_state: algebraic routes disagree");
    }
    return direct;
}

/// Both candidate values for the shunted steady state. `mass_balance` is the
/// fixed point of the shunted balance equation,
///   (nu_a P_eq + nu_s P_op) / (nu_a + nu_s),
/// and is the canonical value. `printed` is the (nu_a P_eq - nu_s P_op) /
/// (nu_a - nu_s) variant, kept for reporting; it disagrees with the balance
/// equation and with numerical integration.
struct ShuntFixedPoint {
    double mass_balance;
    double printed;
};

/// Compute both shunted fixed-point formulas. Compliance cancels from both
/// ratios, so only the resistances enter.
inline ShuntFixedPoint shunted_fixed_point_both(const SystemParams& params) {
    params.validate();
    if (!params.shunt)
        throw ConfigurationError("shunted_fixed_point: no shunt block configured");
    if (!(params.shunt->R_s > 0.0))
        throw std::invalid_argument("shunted_fixed_point: R_s must be > 0");
    const double p_eq = equilibrium_pressure(params);
    const double ga = 1.0 / params.R_a;   // nu_a modulo the common 1/C0 factor
    const double gs = 1.0 / params.shunt->R_s;
    const double mass_balance = (ga * p_eq + gs * params.shunt->P_op) / (ga + gs);
    const double printed = (ga * p_eq - gs * params.shunt->P_op) / (ga - gs);
    return {mass_balance, printed};
}

/**
 * @brief Canonical shunted steady state (mass-balance fixed point).
 *
 * @throws ShuntClosedError if the fixed point lies strictly below the valve
 *         opening pressure, i.e. the open-shunt premise fails.
 */
inline double shunted_fixed_point(const SystemParams& params) {
    const double p = shunted_fixed_point_both(params).mass_balance;
    if (p < params.shunt->P_op)
        throw ShuntClosedError("shunted fixed point " + std::to_string(p) +
                               " mmH2O is below the opening pressure " +
                               std::to_string(params.shunt->P_op) + " mmH2O; shunt stays closed");
    return p;
}

/// Rates and lumped constants derived from the circuit parameters. Each field
/// is present only when the quantities it is built from exist.
struct DerivedRates {
    std::optional<double> nu_a;        // 1/(C0 R_a) [1/min]
    std::optional<double> nu_i;        // 1/(C0 R_i)
    std::optional<double> nu_s;        // 1/(C0 R_s)
    std::optional<double> alpha;       // k/R_a [1/(mmH2O min)]
    std::optional<double> P_i;         // R_i S_i [mmH2O]
    std::optional<double> P_b;         // P_eq + R_a S_b [mmH2O]
    std::optional<double> nu_b;        // alpha P_b [1/min]
    std::optional<double> nu_b_prime;  // alpha R_a S_b [1/min]

    static DerivedRates from(const SystemParams& params, const ComplianceModel& model,
                             std::optional<double> bolus_rate = std::nullopt) {
        params.validate();
        validate(model);
        DerivedRates r;
        if (const auto* c = std::get_if<ConstantCompliance>(&model)) {
            r.nu_a = 1.0 / (c->C0 * params.R_a);
            if (params.infusion && params.infusion->R_i > 0.0)
                r.nu_i = 1.0 / (c->C0 * params.infusion->R_i);
            if (params.shunt && params.shunt->R_s > 0.0)
                r.nu_s = 1.0 / (c->C0 * params.shunt->R_s);
        }
        if (const auto* h = std::get_if<HyperbolicCompliance>(&model)) {
            const double alpha = h->k / params.R_a;
            r.alpha = alpha;
            if (bolus_rate) {
                const double p_b = equilibrium_pressure(params) + params.R_a * *bolus_rate;
                r.P_b = p_b;
                r.nu_b = alpha * p_b;
                r.nu_b_prime = alpha * params.R_a * *bolus_rate;
            }
        }
        if (params.infusion) r.P_i = params.infusion->R_i * params.infusion->S_i;
        return r;
    }
};

}  // namespace csf
