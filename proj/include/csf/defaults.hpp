#pragma once

/**
 * @file defaults.hpp
 * @brief Canonical default parameter values (single source for figures, CLI
 *        configuration, and estimation initial guesses).
 *
 * Units: mmH2O, cc, min.
 */

#include "csf/compliance.hpp"
#include "csf/params.hpp"

namespace csf::defaults {

inline constexpr double C_0 = 0.004;    // cc/mmH2O
inline constexpr double I_f_e = 0.078;  // cc/min
inline constexpr double k = 1.0;        // 1/cc
inline constexpr double P_0 = 244.0;    // mmH2O
inline constexpr double P_d = 70.0;     // mmH2O
inline constexpr double P_bar = 40.0;   // mmH2O
inline constexpr double P_prime = 150.0;  // mmH2O
inline constexpr double P_op = 45.0;    // mmH2O
inline constexpr double R_a = 600.0;    // mmH2O/(ml/min)
inline constexpr double R_i = 600.0;    // mmH2O/(ml/min)
inline constexpr double R_s = 60.0;     // mmH2O/(ml/min)
inline constexpr double S_b = 40.0;     // cc/min
inline constexpr double S_i = 0.216;    // cc/min
inline constexpr double t_b = 5.0;      // min
inline constexpr double dt_b = 5.0;     // min
inline constexpr double t_s = 5.0;      // min
inline constexpr double t_0 = 4.0;      // min
inline constexpr double t_i = 4.0;      // min

inline SystemParams params() {
    SystemParams p;
    p.R_a = R_a;
    p.I_f_e = I_f_e;
    p.P_d = P_d;
    p.P_0 = P_0;
    return p;
}

inline ConstantCompliance constant_compliance() { return {C_0}; }
inline HyperbolicCompliance hyperbolic_compliance() { return {k}; }

}  // namespace csf::defaults
