#pragma once

/**
 * @file compliance.hpp
 * @brief Brain compliance laws C(P) = dV/dP and their pressure-volume relations.
 *
 * Four phenomenological laws are supported. Each pairs a compliance function
 * with the closed-form pressure-volume relation obtained by integrating
 * dV/dP = C(P):
 *
 *   Constant            C(P) = C0            P = P' + dV/C0
 *   Hyperbolic          C(P) = 1/(k P)       P = P' exp(k dV)
 *   ShiftedHyperbolic   C(P) = 1/(k1 P + k2) P = (P' + k2/k1) exp(k1 dV) - k2/k1
 *   Exponential         C(P) = a exp(-b P)   P = -(1/b) ln(exp(-b P') - (b/a) dV)
 *
 * Units are fixed throughout the library: pressures in mmH2O, volumes in cc,
 * times in minutes.
 */

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>

#include "csf/errors.hpp"

namespace csf {

/// C(P) = C0, pressure-independent.
struct ConstantCompliance {
    double C0;  // cc/mmH2O
};

/// C(P) = 1/(k P). Singular at P = 0; guarded by kMinHyperbolicPressure.
struct HyperbolicCompliance {
    double k;  // 1/cc
};

/// C(P) = 1/(k1 P + k2). Finite compliance 1/k2 at zero pressure.
struct ShiftedHyperbolicCompliance {
    double k1;  // 1/cc
    double k2;  // mmH2O/cc
};

/// C(P) = a exp(-b P). b = 0 degenerates to the constant law with C0 = a.
struct ExponentialCompliance {
    double a;  // cc/mmH2O
    double b;  // 1/mmH2O
};

using ComplianceModel = std::variant<ConstantCompliance, HyperbolicCompliance,
                                     ShiftedHyperbolicCompliance, ExponentialCompliance>;

/// Pressure floor for the hyperbolic law; C(P) diverges as P -> 0 and the
/// infinite compliance there is unphysical.
inline constexpr double kMinHyperbolicPressure = 1e-6;  // mmH2O

inline const char* model_name(const ComplianceModel& model) {
    struct Visitor {
        const char* operator()(const ConstantCompliance&) const { return "constant"; }
        const char* operator()(const HyperbolicCompliance&) const { return "hyperbolic"; }
        const char* operator()(const ShiftedHyperbolicCompliance&) const {
            return "shifted_hyperbolic";
        }
        const char* operator()(const ExponentialCompliance&) const { return "exponential"; }
    };
    return std::visit(Visitor{}, model);
}

/// Throws std::invalid_argument if the law's parameters are out of range.
inline void validate(const ComplianceModel& model) {
    struct Visitor {
        void operator()(const ConstantCompliance& m) const {
            if (!(m.C0 > 0.0)) throw std::invalid_argument("constant compliance requires C0 > 0");
        }
        void operator()(const HyperbolicCompliance& m) const {
            if (!(m.k > 0.0)) throw std::invalid_argument("hyperbolic compliance requires k > 0");
        }
        void operator()(const ShiftedHyperbolicCompliance& m) const {
            if (!(m.k1 > 0.0) || !(m.k2 > 0.0))
                throw std::invalid_argument(
                    "shifted hyperbolic compliance requires k1 > 0 and k2 > 0");
        }
        void operator()(const ExponentialCompliance& m) const {
            if (!(m.a > 0.0) || m.b < 0.0)
                throw std::invalid_argument("exponential compliance requires a > 0 and b >= 0");
        }
    };
    std::visit(Visitor{}, model);
}

/**
 * @brief Evaluate the compliance C(P) of the given law.
 *
 * @param model     Compliance law and parameters.
 * @param pressure  CSF pressure [mmH2O]. Must be positive for the hyperbolic
 *                  and shifted hyperbolic laws.
 * @return C(P) [cc/mmH2O], strictly positive.
 */
inline double compliance_at(const ComplianceModel& model, double pressure) {
    validate(model);
    if (!std::isfinite(pressure)) throw std::domain_error("compliance_at: non-finite pressure");

    struct Visitor {
        double P;
        double operator()(const ConstantCompliance& m) const {
            if (P < 0.0) throw std::domain_error("constant compliance: negative pressure");
            return m.C0;
        }
        double operator()(const HyperbolicCompliance& m) const {
            if (P < kMinHyperbolicPressure)
                throw std::domain_error(
                    "hyperbolic compliance is singular at P = 0; pressure below floor " +
                    std::to_string(kMinHyperbolicPressure) + " mmH2O");
            return 1.0 / (m.k * P);
        }
        double operator()(const ShiftedHyperbolicCompliance& m) const {
            if (P <= 0.0)
                throw std::domain_error("shifted hyperbolic compliance: non-positive pressure");
            return 1.0 / (m.k1 * P + m.k2);
        }
        double operator()(const ExponentialCompliance& m) const {
            if (P < 0.0) throw std::domain_error("exponential compliance: negative pressure");
            return m.a * std::exp(-m.b * P);
        }
    };
    return std::visit(Visitor{pressure}, model);
}

/**
 * @brief Pressure reached after adding volume dV starting from P_ref.
 *
 * Inverts the volume-storage relation dV/dP = C(P) in closed form.
 * pv_relation(model, 0, P_ref) == P_ref for every law.
 *
 * @throws std::range_error if dV drives the law out of its pressure domain
 *         (logarithm argument <= 0, or non-positive resulting pressure for
 *         the singular laws).
 */
inline double pv_relation(const ComplianceModel& model, double delta_v, double p_ref) {
    validate(model);
    if (!std::isfinite(delta_v) || !std::isfinite(p_ref))
        throw std::domain_error("pv_relation: non-finite argument");

    struct Visitor {
        double dV, Pr;
        // dV == 0 returns Pr exactly in every law below; the explicit early
        // returns keep the identity free of exp/log round-trip rounding.
        double operator()(const ConstantCompliance& m) const { return Pr + dV / m.C0; }
        double operator()(const HyperbolicCompliance& m) const {
            if (Pr < kMinHyperbolicPressure)
                throw std::domain_error("hyperbolic pv_relation: reference pressure below floor");
            return Pr * std::exp(m.k * dV);
        }
        double operator()(const ShiftedHyperbolicCompliance& m) const {
            if (Pr <= 0.0)
                throw std::domain_error("shifted hyperbolic pv_relation: non-positive reference");
            if (dV == 0.0) return Pr;
            const double shift = m.k2 / m.k1;
            const double p = (Pr + shift) * std::exp(m.k1 * dV) - shift;
            if (p <= 0.0)
                throw std::range_error("shifted hyperbolic pv_relation: pressure left domain");
            return p;
        }
        double operator()(const ExponentialCompliance& m) const {
            if (Pr < 0.0) throw std::domain_error("exponential pv_relation: negative reference");
            if (m.b == 0.0) return Pr + dV / m.a;  // constant-law limit
            if (dV == 0.0) return Pr;
            const double arg = std::exp(-m.b * Pr) - (m.b / m.a) * dV;
            if (arg <= 0.0)
                throw std::range_error(
                    "exponential pv_relation: logarithm argument <= 0 (volume beyond capacity)");
            return -std::log(arg) / m.b;
        }
    };
    return std::visit(Visitor{delta_v, p_ref}, model);
}

/**
 * @brief Pressure-volume index: injected volume per natural-log unit of
 *        pressure ratio.
 *
 * For the hyperbolic law PVI = dV / ln(P/P') = 1/k; for the shifted
 * hyperbolic law the pressures are offset by k2/k1 and PVI = 1/k1.
 * Defined only for those two laws. At dV = 0 the parameter-derived limit
 * 1/k (resp. 1/k1) is returned.
 */
inline double pvi(const ComplianceModel& model, double delta_v, double pressure, double p_ref) {
    validate(model);

    struct Visitor {
        double dV, P, Pr;
        double operator()(const ConstantCompliance&) const {
            throw UnsupportedOperationError("pvi is undefined for the constant compliance law");
        }
        double operator()(const ExponentialCompliance&) const {
            throw UnsupportedOperationError("pvi is undefined for the exponential compliance law");
        }
        double operator()(const HyperbolicCompliance& m) const {
            if (dV == 0.0) return 1.0 / m.k;
            if (P <= 0.0 || Pr <= 0.0) throw std::domain_error("pvi: non-positive pressure");
            if (P == Pr) throw std::domain_error("pvi: P == P_ref with nonzero dV");
            return dV / std::log(P / Pr);
        }
        double operator()(const ShiftedHyperbolicCompliance& m) const {
            if (dV == 0.0) return 1.0 / m.k1;
            if (P <= 0.0 || Pr <= 0.0) throw std::domain_error("pvi: non-positive pressure");
            if (P == Pr) throw std::domain_error("pvi: P == P_ref with nonzero dV");
            const double shift = m.k2 / m.k1;
            return dV / std::log((P + shift) / (Pr + shift));
        }
    };
    return std::visit(Visitor{delta_v, pressure, p_ref}, model);
}

}  // namespace csf
