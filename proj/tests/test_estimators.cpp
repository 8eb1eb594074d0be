#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "fixtures.hpp"
#include "sacekit/errors.hpp"
#include "sacekit/estimators.hpp"
#include "sacekit/trial.hpp"

using namespace sacekit;
using fixtures::discrete_population;
using fixtures::near;

namespace {

ObservedSummary reference_summary() {
    return expected_observed_summary(discrete_population());
}

ArmObservation point_arm(double rate, double value) {
    return {rate, DiscreteDist::from_atoms({{value, 1.0}})};
}

AssumptionSet assume(bool mono, bool dom) {
    AssumptionSet a;
    a.monotonicity = mono;
    a.stochastic_dominance = dom;
    return a;
}

}  // namespace

TEST_CASE("trimmed means of the treated survivor cell, by hand") {
    const DiscreteDist d =
        DiscreteDist::from_atoms({{600.0, 2.0 / 3.0}, {900.0, 1.0 / 3.0}});
    CHECK(near(d.top_trimmed_mean(1.0 / 3.0), 900.0, 1e-12));
    CHECK(near(d.top_trimmed_mean(2.0 / 3.0), 750.0, 1e-12));
    CHECK(near(d.top_trimmed_mean(1.0), 700.0, 1e-12));
    CHECK(d.bottom_trimmed_mean(2.0 / 3.0) == 600.0);  // single-atom slice is exact
    CHECK(near(d.bottom_trimmed_mean(5.0 / 6.0), 660.0, 1e-12));
    CHECK(near(d.bottom_trimmed_mean(1.0), 700.0, 1e-12));

    // Fraction 0 is the vanishing-slice limit: the extreme support value.
    CHECK(d.top_trimmed_mean(0.0) == 900.0);
    CHECK(d.bottom_trimmed_mean(0.0) == 600.0);

    // A fraction one rounding step above 1 clamps to the full mean; anything
    // clearly outside [0, 1] is an error, as is an empty distribution.
    CHECK(near(d.top_trimmed_mean(1.0 + 1e-13), 700.0, 1e-12));
    CHECK_THROWS_AS(d.top_trimmed_mean(1.5), ValidationError);
    CHECK_THROWS_AS(d.bottom_trimmed_mean(-0.1), ValidationError);
    CHECK_THROWS_AS(DiscreteDist{}.top_trimmed_mean(0.5), ValidationError);
}

TEST_CASE("trimmed means tighten monotonically toward the mean") {
    SplitMix64 rng(12);
    for (int trial = 0; trial < 40; ++trial) {
        const DiscreteDist d = fixtures::random_dist(rng);
        const double mean = d.mean();
        double prev_top = d.top_trimmed_mean(0.0);
        double prev_bottom = d.bottom_trimmed_mean(0.0);
        CHECK(prev_top == d.max_value());
        CHECK(prev_bottom == d.min_value());
        for (int k = 1; k <= 20; ++k) {
            const double f = k / 20.0;
            const double top = d.top_trimmed_mean(f);
            const double bottom = d.bottom_trimmed_mean(f);
            CHECK(top <= prev_top + 1e-9);
            CHECK(bottom >= prev_bottom - 1e-9);
            CHECK(top >= mean - 1e-9);
            CHECK(bottom <= mean + 1e-9);
            prev_top = top;
            prev_bottom = bottom;
        }
        CHECK(near(d.top_trimmed_mean(1.0), mean, 1e-9));
        CHECK(near(d.bottom_trimmed_mean(1.0), mean, 1e-9));
    }
}

TEST_CASE("survivor contrast and zero-imputation foils on the reference data") {
    const ObservedSummary summary = reference_summary();
    // Survivor means 700 vs 750: the naive comparison is negative even
    // though the within-stratum effect is +200.
    CHECK(near(naive_survivor_contrast(summary), -50.0, 1e-9));
    // Imputing 0 for the dead: (0.6*700 - 0.4*750) / 0.2 = 600.
    CHECK(near(ive_zero_imputation(summary), 600.0, 1e-9));
}

TEST_CASE("foils refuse degenerate inputs") {
    ObservedSummary no_survivors;
    no_survivors.cell(Arm::T, Survival::dead).share = 0.5;
    no_survivors.cell(Arm::C, Survival::dead).share = 0.5;
    CHECK_THROWS_AS(naive_survivor_contrast(no_survivors), EstimationError);

    // Equal survival rates put zero in the imputation denominator.
    PopulationSpec pop;
    pop.strata = {
        fixtures::make_stratum(PrincipalStratum::LL, 0.5, NormalLaw{10, 0},
                               NormalLaw{20, 0}),
        fixtures::make_stratum(PrincipalStratum::LD, 0.0, std::nullopt, std::nullopt),
        fixtures::make_stratum(PrincipalStratum::DL, 0.0, std::nullopt, std::nullopt),
        fixtures::make_stratum(PrincipalStratum::DD, 0.5, std::nullopt, std::nullopt),
    };
    CHECK_THROWS_AS(ive_zero_imputation(expected_observed_summary(pop)),
                    EstimationError);
}

TEST_CASE("bound envelope on the reference data, all four assumption rows") {
    const ObservedSummary summary = reference_summary();
    const ArmObservation obs_t = arm_observation(summary, Arm::T);
    const ArmObservation obs_c = arm_observation(summary, Arm::C);
    CHECK(near(obs_t.survival_rate, 0.6, 1e-12));
    CHECK(near(obs_c.survival_rate, 0.4, 1e-12));

    struct Row {
        bool mono, dom;
        double lo, hi;
    };
    const std::vector<Row> rows = {
        {false, false, -200.0, 200.0},
        {true, false, -150.0, 0.0},
        {false, true, -100.0, 150.0},
        {true, true, -50.0, 0.0},
    };
    for (const Row& row : rows) {
        CAPTURE(row.mono);
        CAPTURE(row.dom);
        const BoundsResult res = sace_bounds(obs_t, obs_c, assume(row.mono, row.dom));
        REQUIRE(res.feasible);
        CHECK(near(res.lower, row.lo, 1e-3));
        CHECK(near(res.upper, row.hi, 1e-3));
        CHECK(res.lower <= res.upper);
        CHECK(!res.attained_at_lower.empty());
        CHECK(!res.attained_at_upper.empty());
        if (row.mono) {
            CHECK(res.pi_ll_range.lo == res.pi_ll_range.hi);
            CHECK(near(res.pi_ll_range.lo, 0.4, 1e-12));
            CHECK(!res.pi_ll_range.open_lo);
        } else {
            CHECK(res.pi_ll_range.lo == 0.0);
            CHECK(near(res.pi_ll_range.hi, 0.4, 1e-12));
            CHECK(res.pi_ll_range.open_lo);
        }
    }
}

TEST_CASE("point-mass arms with monotonicity identify the contrast exactly") {
    const BoundsResult res =
        sace_bounds(point_arm(0.8, 5.0), point_arm(0.5, 3.0), assume(true, false));
    REQUIRE(res.feasible);
    CHECK(near(res.lower, 2.0, 1e-12));
    CHECK(near(res.upper, 2.0, 1e-12));
}

TEST_CASE("monotonicity is declared infeasible when control outlives treated") {
    const BoundsResult res =
        sace_bounds(point_arm(0.3, 5.0), point_arm(0.6, 3.0), assume(true, false));
    CHECK(!res.feasible);
    CHECK(!res.infeasible_reason.empty());
    // Without the assumption the same data are fine.
    CHECK(sace_bounds(point_arm(0.3, 5.0), point_arm(0.6, 3.0),
                      assume(false, false))
              .feasible);
}

TEST_CASE("a zero survival rate leaves the estimand undefined") {
    const ArmObservation alive = point_arm(0.5, 1.0);
    const ArmObservation dead{0.0, DiscreteDist{}};
    CHECK_THROWS_AS(sace_bounds(alive, dead, assume(false, false)),
                    UndefinedSaceError);
    CHECK_THROWS_AS(sace_bounds(dead, alive, assume(false, false)),
                    UndefinedSaceError);
    CHECK_THROWS_AS(bounds_oracle(alive, dead, assume(false, false)),
                    UndefinedSaceError);
}

TEST_CASE("shifting one arm's outcomes shifts the bounds with it") {
    SplitMix64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        ArmObservation obs_t = fixtures::random_arm_observation(rng);
        ArmObservation obs_c = fixtures::random_arm_observation(rng);
        const double delta = -50.0 + 100.0 * rng.uniform01();
        std::vector<DiscreteDist::Atom> shifted;
        for (const DiscreteDist::Atom& a : obs_t.survivor_dist.atoms())
            shifted.push_back({a.value + delta, a.mass});
        ArmObservation obs_t2{obs_t.survival_rate,
                              DiscreteDist::from_atoms(std::move(shifted))};
        for (bool dom : {false, true}) {
            const BoundsResult base =
                sace_bounds(obs_t, obs_c, assume(false, dom), {201, DominanceForm::mean});
            const BoundsResult moved = sace_bounds(obs_t2, obs_c, assume(false, dom),
                                                   {201, DominanceForm::mean});
            REQUIRE(base.feasible);
            REQUIRE(moved.feasible);
            CHECK(near(moved.lower, base.lower + delta, 1e-6));
            CHECK(near(moved.upper, base.upper + delta, 1e-6));
        }
    }
}

TEST_CASE("stronger assumptions give nested intervals") {
    SplitMix64 rng(43);
    for (int trial = 0; trial < 30; ++trial) {
        ArmObservation a = fixtures::random_arm_observation(rng);
        ArmObservation b = fixtures::random_arm_observation(rng);
        // Orient the arms so monotonicity is feasible.
        ArmObservation obs_t = a.survival_rate >= b.survival_rate ? a : b;
        ArmObservation obs_c = a.survival_rate >= b.survival_rate ? b : a;

        const BoundsResult none = sace_bounds(obs_t, obs_c, assume(false, false));
        const BoundsResult mono = sace_bounds(obs_t, obs_c, assume(true, false));
        const BoundsResult dom = sace_bounds(obs_t, obs_c, assume(false, true));
        const BoundsResult both = sace_bounds(obs_t, obs_c, assume(true, true));
        REQUIRE(none.feasible);
        REQUIRE(mono.feasible);
        REQUIRE(dom.feasible);
        REQUIRE(both.feasible);

        const double slack = 1e-9;
        for (const BoundsResult* narrower : {&mono, &dom, &both}) {
            CHECK(narrower->lower >= none.lower - slack);
            CHECK(narrower->upper <= none.upper + slack);
        }
        CHECK(both.lower >= mono.lower - slack);
        CHECK(both.upper <= mono.upper + slack);
        CHECK(both.lower >= dom.lower - slack);
        CHECK(both.upper <= dom.upper + slack);

        // The naive contrast always sits inside the assumption-free bounds.
        const double naive =
            obs_t.survivor_dist.mean() - obs_c.survivor_dist.mean();
        CHECK(naive >= none.lower - slack);
        CHECK(naive <= none.upper + slack);
    }
}

TEST_CASE("the linear-program route reproduces the trimming route") {
    const ObservedSummary summary = reference_summary();
    const ArmObservation obs_t = arm_observation(summary, Arm::T);
    const ArmObservation obs_c = arm_observation(summary, Arm::C);

    for (bool mono : {false, true}) {
        for (bool dom : {false, true}) {
            CAPTURE(mono);
            CAPTURE(dom);
            const BoundsResult engine =
                sace_bounds(obs_t, obs_c, assume(mono, dom), {201, DominanceForm::mean});
            const BoundsResult lp = bounds_oracle(obs_t, obs_c, assume(mono, dom), 201);
            REQUIRE(engine.feasible);
            REQUIRE(lp.feasible);
            CHECK(near(engine.lower, lp.lower, 1e-6));
            CHECK(near(engine.upper, lp.upper, 1e-6));
        }
    }
}

TEST_CASE("the two routes agree on random observations") {
    SplitMix64 rng(47);
    for (int trial = 0; trial < 10; ++trial) {
        ArmObservation a = fixtures::random_arm_observation(rng);
        ArmObservation b = fixtures::random_arm_observation(rng);
        ArmObservation obs_t = a.survival_rate >= b.survival_rate ? a : b;
        ArmObservation obs_c = a.survival_rate >= b.survival_rate ? b : a;
        for (bool mono : {false, true}) {
            for (bool dom : {false, true}) {
                const BoundsResult engine = sace_bounds(obs_t, obs_c, assume(mono, dom),
                                                        {101, DominanceForm::mean});
                const BoundsResult lp =
                    bounds_oracle(obs_t, obs_c, assume(mono, dom), 101);
                REQUIRE(engine.feasible == lp.feasible);
                if (!engine.feasible) continue;
                CHECK(near(engine.lower, lp.lower, 1e-6));
                CHECK(near(engine.upper, lp.upper, 1e-6));
            }
        }
    }
}

TEST_CASE("mean and first-order dominance give the same endpoints") {
    SplitMix64 rng(53);
    for (int trial = 0; trial < 8; ++trial) {
        ArmObservation a = fixtures::random_arm_observation(rng);
        ArmObservation b = fixtures::random_arm_observation(rng);
        ArmObservation obs_t = a.survival_rate >= b.survival_rate ? a : b;
        ArmObservation obs_c = a.survival_rate >= b.survival_rate ? b : a;
        for (bool mono : {false, true}) {
            const AssumptionSet assumptions = assume(mono, true);
            const BoundsResult engine_mean =
                sace_bounds(obs_t, obs_c, assumptions, {101, DominanceForm::mean});
            const BoundsResult engine_fosd = sace_bounds(
                obs_t, obs_c, assumptions, {101, DominanceForm::first_order});
            CHECK(engine_mean.lower == engine_fosd.lower);
            CHECK(engine_mean.upper == engine_fosd.upper);

            const BoundsResult lp_mean =
                bounds_oracle(obs_t, obs_c, assumptions, 101, DominanceForm::mean);
            const BoundsResult lp_fosd = bounds_oracle(obs_t, obs_c, assumptions, 101,
                                                       DominanceForm::first_order);
            CHECK(near(lp_mean.lower, lp_fosd.lower, 1e-6));
            CHECK(near(lp_mean.upper, lp_fosd.upper, 1e-6));
            CHECK(near(engine_mean.lower, lp_fosd.lower, 1e-6));
            CHECK(near(engine_mean.upper, lp_fosd.upper, 1e-6));
        }
    }
}

TEST_CASE("arm extraction rejects continuous survivor laws") {
    ObservedSummary summary = reference_summary();
    summary.cell(Arm::T, Survival::alive).y->components[0].law.sd = 25.0;
    CHECK_THROWS_AS(arm_observation(summary, Arm::T), ValidationError);
    CHECK_NOTHROW(arm_observation(summary, Arm::C));
}
