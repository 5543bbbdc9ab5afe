#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "csf/analytic.hpp"
#include "csf/defaults.hpp"

using namespace csf;

namespace {
const SystemParams params = defaults::params();  // P_eq = 116.8, nu_a = 1/2.4
constexpr double kPeq = 116.8;
}  // namespace

TEST_CASE("linear no-source relaxation") {
    const ConstantCompliance c0{0.004};
    CHECK(linear_solve(NoSourceLinear{}, params, c0, 0.0) == 244.0);
    // One relaxation time: P_eq + (P_0 - P_eq)/e.
    const double expected = kPeq + (244.0 - kPeq) * std::exp(-1.0);
    CHECK(linear_solve(NoSourceLinear{}, params, c0, 2.4) == Catch::Approx(expected));
    CHECK(linear_solve(NoSourceLinear{}, params, c0, 2.4) == Catch::Approx(163.6).margin(0.01));

    SystemParams at_eq = params;
    at_eq.P_0 = kPeq;
    for (double t : {0.0, 1.0, 7.7, 44.0})
        CHECK(linear_solve(NoSourceLinear{}, at_eq, c0, t) == Catch::Approx(kPeq));

    CHECK_THROWS_AS(linear_solve(NoSourceLinear{}, params, c0, -0.1), std::domain_error);
}

TEST_CASE("linear impulse bolus jumps by P_bar at t_0, inclusive") {
    const ConstantCompliance c0{0.004};
    const ImpulseBolus bolus{40.0, 4.0};
    const double base = linear_solve(NoSourceLinear{}, params, c0, 4.0);
    // Step convention: the pulse is already present at t = t_0.
    CHECK(linear_solve(bolus, params, c0, 4.0) == Catch::Approx(base + 40.0));
    CHECK(linear_solve(bolus, params, c0, 3.999999) ==
          Catch::Approx(linear_solve(NoSourceLinear{}, params, c0, 3.999999)));
    // Long after, the pulse has decayed away.
    CHECK(linear_solve(bolus, params, c0, 100.0) == Catch::Approx(kPeq).epsilon(1e-9));

    const ImpulseBolus withdrawal{-40.0, 4.0};
    CHECK(linear_solve(withdrawal, params, c0, 4.0) == Catch::Approx(base - 40.0));
}

TEST_CASE("linear infusion plateaus at the steady state") {
    const ConstantCompliance c0{0.004};
    const ConstantInfusionLinear inf{0.216, 600.0, 4.0};
    CHECK(linear_solve(inf, params, c0, 3.0) ==
          Catch::Approx(linear_solve(NoSourceLinear{}, params, c0, 3.0)));
    CHECK(linear_solve(inf, params, c0, 500.0) == Catch::Approx(246.4).epsilon(1e-10));
}

TEST_CASE("linear shunt relaxes to the mass-balance fixed point") {
    const ConstantCompliance c0{0.004};
    const ShuntLinear shunt{60.0, 45.0, 5.0};
    CHECK(linear_solve(shunt, params, c0, 200.0) ==
          Catch::Approx(2834.0 / 55.0).epsilon(1e-12));
    // Continuous at t_s.
    const double left = linear_solve(shunt, params, c0, 5.0 - 1e-12);
    const double right = linear_solve(shunt, params, c0, 5.0);
    CHECK(left == Catch::Approx(right).epsilon(1e-9));
}

TEST_CASE("riccati no-source relaxation") {
    CHECK(riccati_no_source(params, 1.0, 244.0, 0.0) == Catch::Approx(244.0));
    const double expected = kPeq / (1.0 + (kPeq / 244.0 - 1.0) * std::exp(-kPeq * 5.0 / 600.0));
    CHECK(riccati_no_source(params, 1.0, 244.0, 5.0) == Catch::Approx(expected));
    CHECK(riccati_no_source(params, 1.0, 244.0, 5.0) == Catch::Approx(145.45).margin(0.005));
    CHECK(riccati_no_source(params, 1.0, 244.0, 1e6) == Catch::Approx(kPeq).epsilon(1e-12));
    // Approach from below as well.
    CHECK(riccati_no_source(params, 1.0, 80.0, 1e6) == Catch::Approx(kPeq).epsilon(1e-12));
    CHECK_THROWS_AS(riccati_no_source(params, 1.0, 0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(riccati_no_source(params, 1.0, 244.0, -1.0), std::domain_error);
}

TEST_CASE("riccati finite bolus: degenerate rate reduces to no-source") {
    const FiniteBolus none{0.0, 5.0, 5.0};
    for (double t : {0.0, 2.0, 5.0, 7.5, 10.0, 25.0})
        CHECK(riccati_finite_bolus(params, 1.0, none, t) ==
              Catch::Approx(riccati_no_source(params, 1.0, 244.0, t)).epsilon(1e-12));
}

TEST_CASE("riccati finite bolus is continuous at both matching points") {
    for (double s_b : {40.0, 0.04, -0.05}) {
        const FiniteBolus bolus{s_b, 5.0, 5.0};
        CAPTURE(s_b);
        for (double edge : {5.0, 10.0}) {
            const double left = riccati_finite_bolus(params, 1.0, bolus, edge - 1e-12);
            const double right = riccati_finite_bolus(params, 1.0, bolus, edge);
            CHECK(left == Catch::Approx(right).epsilon(1e-9));
        }
    }
}

TEST_CASE("riccati finite bolus rises toward P_b during the window and recovers") {
    const FiniteBolus bolus{0.04, 5.0, 5.0};
    SystemParams from_eq = params;
    from_eq.P_0 = kPeq;
    const double p_b = kPeq + 600.0 * 0.04;  // 140.8
    const double mid = riccati_finite_bolus(from_eq, 1.0, bolus, 9.9);
    CHECK(mid > kPeq);
    CHECK(mid < p_b);
    CHECK(riccati_finite_bolus(from_eq, 1.0, bolus, 500.0) == Catch::Approx(kPeq).epsilon(1e-10));
}

TEST_CASE("riccati finite bolus: strong short withdrawal dips and recovers") {
    SystemParams from_eq = params;
    from_eq.P_0 = kPeq;
    const FiniteBolus withdrawal{-0.5, 1.0, 0.05};  // P_b < 0, valid short pull
    const double dipped = riccati_finite_bolus(from_eq, 1.0, withdrawal, 1.05);
    CHECK(dipped > 0.0);
    CHECK(dipped < kPeq);
    CHECK(riccati_finite_bolus(from_eq, 1.0, withdrawal, 400.0) ==
          Catch::Approx(kPeq).epsilon(1e-10));
    // Resonant rate: the window solution degenerates.
    const FiniteBolus resonant{-kPeq / 600.0, 1.0, 1.0};
    CHECK_THROWS_AS(riccati_finite_bolus(from_eq, 1.0, resonant, 1.5), SingularityError);
}

TEST_CASE("riccati instant bolus: jump size and relaxation") {
    CHECK(riccati_instant_bolus(params, 1.0, 0.2, 0.0) == Catch::Approx(kPeq * std::exp(0.2)));
    CHECK(riccati_instant_bolus(params, 1.0, 0.2, 0.0) == Catch::Approx(142.66).margin(0.005));
    for (double t : {0.0, 3.0, 12.0})
        CHECK(riccati_instant_bolus(params, 1.0, 0.0, t) == Catch::Approx(kPeq));
    // Withdrawal recovers to equilibrium.
    CHECK(riccati_instant_bolus(params, 1.0, -0.2, 1e6) == Catch::Approx(kPeq).epsilon(1e-12));
    // ln-jump law.
    const double p0 = riccati_instant_bolus(params, 1.0, 0.37, 0.0);
    CHECK(std::log(p0 / kPeq) == Catch::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("instant bolus solution matches no-source relaxation from the jumped state") {
    // Choosing dV so that P_eq e^(k dV) = P_0 must reproduce the plain
    // relaxation solution.
    const double p_start = 244.0;
    const double dv = std::log(p_start / kPeq);
    for (double t : {0.0, 0.5, 2.0, 9.0, 30.0})
        CHECK(riccati_instant_bolus(params, 1.0, dv, t) ==
              Catch::Approx(riccati_no_source(params, 1.0, p_start, t)).epsilon(1e-12));
}

TEST_CASE("riccati gated growth") {
    // Withdrawal chosen to land exactly at P_0 = 100.
    const double dv = std::log(kPeq / 100.0);
    CHECK(riccati_gated_growth(params, 1.0, dv, 20.0, 0.0) == Catch::Approx(100.0));
    CHECK(riccati_gated_growth(params, 1.0, dv, 20.0, 10.0) ==
          Catch::Approx(100.0 * std::exp(0.78)));
    CHECK(riccati_gated_growth(params, 1.0, dv, 20.0, 10.0) ==
          Catch::Approx(218.15).margin(0.005));

    SECTION("no formation means no growth") {
        SystemParams no_formation = params;
        no_formation.I_f_e = 0.0;
        const double p_start = equilibrium_pressure(no_formation) * std::exp(-dv);
        for (double t : {0.0, 5.0, 19.0})
            CHECK(riccati_gated_growth(no_formation, 1.0, dv, 20.0, t) ==
                  Catch::Approx(p_start));
    }
    SECTION("outside the gated window the formula refuses to answer") {
        CHECK_THROWS_AS(riccati_gated_growth(params, 1.0, dv, 20.0, 20.0), OutOfRegimeError);
        CHECK_THROWS_AS(riccati_gated_growth(params, 1.0, dv, 20.0, 25.0), OutOfRegimeError);
    }
}

TEST_CASE("riccati infusion") {
    CHECK(riccati_infusion(params, 1.0, 0.216, 4.0, 0.0) == kPeq);
    CHECK(riccati_infusion(params, 1.0, 0.216, 4.0, 3.9999) == kPeq);
    CHECK(riccati_infusion(params, 1.0, 0.216, 4.0, 1e5) == Catch::Approx(246.4).epsilon(1e-12));
    for (double t : {0.0, 10.0, 200.0})
        CHECK(riccati_infusion(params, 1.0, 0.0, 4.0, t) == Catch::Approx(kPeq));
    // Monotone rise after t_i.
    double prev = riccati_infusion(params, 1.0, 0.216, 4.0, 4.0);
    for (double t = 4.5; t < 40.0; t += 0.5) {
        const double cur = riccati_infusion(params, 1.0, 0.216, 4.0, t);
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("autonomous segments approach their fixed point monotonically") {
    const ConstantCompliance c0{0.004};
    double prev_lin = 244.0, prev_ric = 244.0;
    for (double t = 0.05; t <= 40.0; t += 0.05) {
        const double lin = linear_solve(NoSourceLinear{}, params, c0, t);
        const double ric = riccati_no_source(params, 1.0, 244.0, t);
        CHECK(lin < prev_lin);
        CHECK(ric < prev_ric);
        CHECK(lin >= kPeq);
        CHECK(ric >= kPeq);
        prev_lin = lin;
        prev_ric = ric;
    }
}
