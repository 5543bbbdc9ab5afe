#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "csf/defaults.hpp"
#include "csf/scenario.hpp"

using namespace csf;

namespace {
constexpr double kPeq = 116.8;
}

TEST_CASE("relaxation scenario decays monotonically to equilibrium") {
    Scenario sc;
    sc.compliance = ConstantCompliance{0.004};
    sc.solver = SolverChoice::both;
    sc.id = "relaxation";
    const RunResult res = run(sc);
    REQUIRE(res.analytic);
    REQUIRE(res.numeric);
    REQUIRE(res.max_rel_discrepancy);
    CHECK(*res.max_rel_discrepancy <= 1e-6);
    const auto& p = res.analytic->pressures;
    CHECK(p.front() == 244.0);
    CHECK(std::is_sorted(p.rbegin(), p.rend()));
    CHECK(p.back() == Catch::Approx(kPeq).epsilon(1e-3));
    CHECK(res.report.P_eq == Catch::Approx(kPeq));
    CHECK(res.report.relaxation_rate == Catch::Approx(1.0 / 2.4));
    CHECK(res.report.relaxation_rate_kind == "nu_a");
}

TEST_CASE("infusion scenario plateaus at the reported steady state") {
    Scenario sc;
    sc.compliance = ConstantCompliance{0.004};
    sc.timeline.add(InfusionOnEvent{0.216, 600.0, 4.0});
    sc.solver = SolverChoice::both;
    const RunResult res = run(sc);
    CHECK(*res.max_rel_discrepancy <= 1e-6);
    REQUIRE(res.report.infusion_P_ss);
    CHECK(*res.report.infusion_P_ss == Catch::Approx(246.4));
    CHECK(res.numeric->pressures.back() == Catch::Approx(246.4).margin(0.1));
}

TEST_CASE("flat scenario stays flat") {
    Scenario sc;
    sc.params.P_0 = kPeq;
    sc.compliance = HyperbolicCompliance{1.0};
    sc.solver = SolverChoice::both;
    const RunResult res = run(sc);
    for (double p : res.numeric->pressures) CHECK(p == Catch::Approx(kPeq).epsilon(1e-10));
    for (double p : res.analytic->pressures) CHECK(p == Catch::Approx(kPeq).epsilon(1e-12));
    CHECK(res.report.relaxation_rate_kind == "alpha_P_eq");
    CHECK(res.report.relaxation_rate == Catch::Approx(kPeq / 600.0));
}

TEST_CASE("analytic requested outside the catalog names the catalog") {
    Scenario sc;
    sc.compliance = ExponentialCompliance{0.004, 0.0004};
    sc.solver = SolverChoice::analytic;
    CHECK_THROWS_MATCHES(run(sc), UnsupportedScenarioError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("closed forms")));

    Scenario two_events;
    two_events.compliance = ConstantCompliance{0.004};
    two_events.timeline.add(InfusionOnEvent{0.216, 600.0, 4.0});
    two_events.timeline.add(InstantBolusEvent{0.16, 8.0});
    two_events.solver = SolverChoice::analytic;
    CHECK_THROWS_AS(run(two_events), UnsupportedScenarioError);
    // Numeric handles the same composition fine.
    two_events.solver = SolverChoice::numeric;
    CHECK_NOTHROW(run(two_events));
}

TEST_CASE("every catalog entry agrees with the engine through run(both)") {
    std::vector<Scenario> scenarios;
    {
        Scenario sc;
        sc.compliance = ConstantCompliance{0.004};
        sc.timeline.add(InstantBolusEvent{0.16, 4.0});
        sc.id = "lin_bolus";
        scenarios.push_back(sc);
    }
    {
        Scenario sc;
        sc.compliance = ConstantCompliance{0.004};
        sc.timeline.add(ShuntOnEvent{60.0, 45.0, 5.0});
        sc.id = "lin_shunt";
        scenarios.push_back(sc);
    }
    {
        Scenario sc;
        sc.compliance = HyperbolicCompliance{1.0};
        sc.timeline.add(FiniteBolusEvent{0.04, 5.0, 5.0});
        sc.id = "ric_bolus";
        scenarios.push_back(sc);
    }
    {
        Scenario sc;
        sc.compliance = HyperbolicCompliance{1.0};
        sc.timeline.add(InstantBolusEvent{-0.16, 4.0});
        sc.id = "ric_withdrawal";
        scenarios.push_back(sc);
    }
    {
        Scenario sc;
        sc.compliance = HyperbolicCompliance{1.0};
        sc.timeline.add(InfusionOnEvent{0.216, 600.0, 4.0});
        sc.id = "ric_infusion";
        scenarios.push_back(sc);
    }
    {
        Scenario sc;
        sc.compliance = HyperbolicCompliance{1.0};
        sc.params.P_0 = 95.0;
        sc.timeline.add(AbsorptionGateEvent{6.0});
        sc.id = "ric_gate";
        scenarios.push_back(sc);
    }
    for (Scenario& sc : scenarios) {
        sc.solver = SolverChoice::both;
        const RunResult res = run(sc);
        CAPTURE(sc.id);
        REQUIRE(res.max_rel_discrepancy);
        CHECK(*res.max_rel_discrepancy <= 1e-6);
    }
}

TEST_CASE("shunt scenario reports both fixed-point values") {
    Scenario sc;
    sc.compliance = ConstantCompliance{0.004};
    sc.timeline.add(ShuntOnEvent{60.0, 45.0, 5.0});
    const RunResult res = run(sc);
    REQUIRE(res.report.shunt_fixed_point);
    CHECK(*res.report.shunt_fixed_point == Catch::Approx(2834.0 / 55.0));
    CHECK(*res.report.shunt_fixed_point_printed == Catch::Approx(1666.0 / 45.0));
    CHECK(res.warnings.empty());
}

TEST_CASE("a shunt that cannot open is warned about") {
    Scenario sc;
    sc.compliance = ConstantCompliance{0.004};
    sc.params.P_0 = 50.0;
    sc.params.P_d = 10.0;  // P_eq = 56.8
    sc.timeline.add(ShuntOnEvent{60.0, 100.0, 5.0});
    const RunResult res = run(sc);
    REQUIRE_FALSE(res.warnings.empty());
    CHECK(res.warnings.front().find("P_op") != std::string::npos);
}

TEST_CASE("event insertion order does not change the trace") {
    auto build = [](const std::vector<Event>& order) {
        Scenario sc;
        sc.compliance = HyperbolicCompliance{1.0};
        for (const auto& e : order) sc.timeline.add(e);
        sc.solver = SolverChoice::numeric;
        return run(sc).numeric->pressures;
    };
    const Event a = FiniteBolusEvent{0.04, 5.0, 2.0};
    const Event b = InstantBolusEvent{-0.1, 12.0};
    const Event c = InfusionOnEvent{0.1, 600.0, 16.0};
    const Event d = AbsorptionGateEvent{2.0};
    const auto p1 = build({a, b, c, d});
    const auto p2 = build({d, c, b, a});
    const auto p3 = build({c, a, d, b});
    CHECK(p1 == p2);
    CHECK(p1 == p3);
}

TEST_CASE("timeline invariants") {
    EventTimeline tl;
    tl.add(FiniteBolusEvent{0.04, 5.0, 5.0});
    CHECK_THROWS_AS(tl.add(FiniteBolusEvent{0.02, 8.0, 4.0}), std::invalid_argument);
    CHECK_NOTHROW(tl.add(FiniteBolusEvent{0.02, 10.0, 4.0}));  // touching is fine
    tl.add(ShuntOnEvent{60.0, 45.0, 5.0});
    CHECK_THROWS_AS(tl.add(ShuntOnEvent{30.0, 40.0, 8.0}), std::invalid_argument);
    tl.add(AbsorptionGateEvent{1.0});
    CHECK_THROWS_AS(tl.add(AbsorptionGateEvent{2.0}), std::invalid_argument);
    CHECK_THROWS_AS(tl.add(InstantBolusEvent{0.1, -1.0}), std::invalid_argument);
    // Events come back sorted by time.
    const auto& evs = tl.events();
    for (std::size_t i = 1; i < evs.size(); ++i)
        CHECK(event_time(evs[i - 1]) <= event_time(evs[i]));
}

TEST_CASE("figure catalog") {
    CHECK_THROWS_AS(figure_data(0), std::invalid_argument);
    CHECK_THROWS_AS(figure_data(8), std::invalid_argument);

    SECTION("fig1: monotone decay from 244 to equilibrium") {
        const auto fig = figure_data(1);
        REQUIRE(fig.traces.size() == 1);
        const auto& p = fig.traces[0].pressures;
        CHECK(p.front() == 244.0);
        CHECK(std::is_sorted(p.rbegin(), p.rend()));
        CHECK(p.back() == Catch::Approx(kPeq).epsilon(1e-3));
    }
    SECTION("fig2/fig3: additive pulses of +/- P_bar at t_0") {
        const auto f2 = figure_data(2).traces[0];
        const auto f3 = figure_data(3).traces[0];
        std::size_t j = 0;
        while (f2.times[j] < 4.0) ++j;
        REQUIRE(f2.times[j] == 4.0);
        CHECK(f2.pressures[j] - f3.pressures[j] == Catch::Approx(80.0).epsilon(1e-12));
        const auto f1 = figure_data(1).traces[0];
        CHECK(f2.pressures[j] - f1.pressures[j] == Catch::Approx(40.0).epsilon(1e-12));
        CHECK(f3.pressures[j] - f1.pressures[j] == Catch::Approx(-40.0).epsilon(1e-12));
        CHECK(f3.pressures.back() == Catch::Approx(kPeq).epsilon(2e-3));
        // The withdrawal recovers upward.
        CHECK(f3.pressures[j] < f3.pressures.back());
    }
    SECTION("fig4: infusion plateau") {
        const auto f4 = figure_data(4).traces[0];
        CHECK(f4.pressures.back() == Catch::Approx(246.4).margin(0.1));
    }
    SECTION("fig5: two traces, measured ordering in the metadata") {
        const auto fig = figure_data(5);
        REQUIRE(fig.traces.size() == 2);
        REQUIRE(fig.columns.size() == 3);
        CHECK(fig.traces[0].pressures.front() ==
              Catch::Approx(fig.traces[1].pressures.front()).epsilon(1e-12));
        bool found = false;
        std::string faster;
        double t_lin = 0.0, t_non = 0.0;
        for (const auto& [k, v] : fig.metadata) {
            if (k == "faster_relaxation") { faster = v; found = true; }
            if (k == "t_half_linear") t_lin = std::stod(v);
            if (k == "t_half_nonlinear") t_non = std::stod(v);
        }
        REQUIRE(found);
        CHECK(faster == ((t_lin < t_non) ? "linear" : "nonlinear"));
    }
    SECTION("fig6: rectangle source, exactly two distinct values") {
        const auto fig = figure_data(6);
        CHECK(fig.columns[1] == "source_cc_per_min");
        std::set<double> values(fig.traces[0].pressures.begin(), fig.traces[0].pressures.end());
        CHECK(values == std::set<double>{0.0, 40.0});
        // Closed interval: both edges carry the rate.
        const auto& tr = fig.traces[0];
        for (std::size_t i = 0; i < tr.size(); ++i) {
            const bool inside = tr.times[i] >= 5.0 && tr.times[i] <= 10.0;
            CHECK(tr.pressures[i] == (inside ? 40.0 : 0.0));
        }
    }
    SECTION("fig7: withdrawal from equilibrium recovers") {
        const auto f7 = figure_data(7).traces[0];
        CHECK(f7.pressures.front() == Catch::Approx(kPeq));
        const double low = *std::min_element(f7.pressures.begin(), f7.pressures.end());
        CHECK(low == Catch::Approx(kPeq * std::exp(-0.16)).epsilon(1e-9));
        CHECK(f7.pressures.back() == Catch::Approx(kPeq).epsilon(2e-3));
    }
}

TEST_CASE("figures with a closed form agree with the engine") {
    // Rebuild each figure as a both-solver scenario and compare.
    auto check_both = [](Scenario sc) {
        sc.solver = SolverChoice::both;
        const RunResult res = run(sc);
        REQUIRE(res.max_rel_discrepancy);
        CHECK(*res.max_rel_discrepancy <= 1e-6);
    };
    Scenario fig1;
    fig1.compliance = ConstantCompliance{0.004};
    check_both(fig1);

    Scenario fig2 = fig1;
    fig2.timeline.add(InstantBolusEvent{0.16, 4.0});
    check_both(fig2);

    Scenario fig3 = fig1;
    fig3.timeline.add(InstantBolusEvent{-0.16, 4.0});
    check_both(fig3);

    Scenario fig4 = fig1;
    fig4.timeline.add(InfusionOnEvent{0.216, 600.0, 4.0});
    check_both(fig4);

    Scenario fig5_nonlinear;
    fig5_nonlinear.compliance = HyperbolicCompliance{1.0};
    check_both(fig5_nonlinear);

    Scenario fig7;
    fig7.compliance = HyperbolicCompliance{1.0};
    fig7.params.P_0 = kPeq;
    fig7.timeline.add(InstantBolusEvent{-0.16, 4.0});
    check_both(fig7);
}

TEST_CASE("equilibrium universality across the figure scenarios") {
    // The long-time limits of figures 1, 2, 3, 5, 7 are all P_eq, whatever
    // the compliance model.
    const SystemParams params = defaults::params();
    const ConstantCompliance c0{0.004};
    const double far = 300.0;
    CHECK(linear_solve(NoSourceLinear{}, params, c0, far) == Catch::Approx(kPeq).epsilon(1e-9));
    CHECK(linear_solve(ImpulseBolus{40.0, 4.0}, params, c0, far) ==
          Catch::Approx(kPeq).epsilon(1e-9));
    CHECK(linear_solve(ImpulseBolus{-40.0, 4.0}, params, c0, far) ==
          Catch::Approx(kPeq).epsilon(1e-9));
    CHECK(riccati_no_source(params, 1.0, 244.0, far) == Catch::Approx(kPeq).epsilon(1e-9));
    CHECK(riccati_instant_bolus(params, 1.0, -0.16, far) == Catch::Approx(kPeq).epsilon(1e-9));
}
