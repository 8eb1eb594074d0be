#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "sacekit/covariate.hpp"
#include "sacekit/errors.hpp"
#include "sacekit/trial.hpp"

using namespace sacekit;
using fixtures::near;

namespace {

void add_units(std::vector<UnitRecord>& records, double x, Arm z, int count,
               bool alive, double y = 0.0) {
    for (int i = 0; i < count; ++i) {
        UnitRecord rec;
        rec.id = static_cast<std::int64_t>(records.size());
        rec.x = x;
        rec.z = z;
        rec.s_obs = alive ? Survival::alive : Survival::dead;
        if (alive) rec.y_obs = y;
        records.push_back(rec);
    }
}

// Four covariate levels, one per stratum, with the reference proportions
// 20/40/20/20 and outcomes 900/700 (always-survivors), 600, 800.
std::vector<UnitRecord> handmade_records() {
    std::vector<UnitRecord> records;
    add_units(records, 800, Arm::T, 2, true, 900);  // always-survivors
    add_units(records, 800, Arm::C, 2, true, 700);
    add_units(records, 500, Arm::T, 4, true, 600);  // survive only treated
    add_units(records, 500, Arm::C, 4, false);
    add_units(records, 900, Arm::T, 2, false);      // survive only control
    add_units(records, 900, Arm::C, 2, true, 800);
    add_units(records, 300, Arm::T, 2, false);      // never survive
    add_units(records, 300, Arm::C, 2, false);
    return records;
}

}  // namespace

TEST_CASE("grouping splits records by exact covariate value") {
    const std::vector<CovariateGroup> groups = group_by_covariate(handmade_records());
    REQUIRE(groups.size() == 4);
    CHECK(groups[0].x_center == 300.0);
    CHECK(groups[1].x_center == 500.0);
    CHECK(groups[2].x_center == 800.0);
    CHECK(groups[3].x_center == 900.0);

    CHECK(groups[1].n == 8);
    CHECK(groups[1].n_t == 4);
    CHECK(groups[1].n_c == 4);
    CHECK(groups[1].survival_rate_t == 1.0);
    CHECK(groups[1].survival_rate_c == 0.0);
    CHECK(*groups[1].mean_y_t == 600.0);
    CHECK(!groups[1].mean_y_c.has_value());
    CHECK(groups[0].survival_rate_t == 0.0);
    CHECK(!groups[0].mean_y_t.has_value());
    // Recovery has not run, so no stratum labels yet.
    CHECK(!groups[2].inferred_stratum.has_value());
}

TEST_CASE("width binning rounds to the nearest multiple") {
    std::vector<UnitRecord> records;
    add_units(records, 299.7, Arm::T, 1, true, 1);
    add_units(records, 301.2, Arm::C, 1, true, 2);
    add_units(records, 349.0, Arm::T, 1, true, 3);   // still nearer 300
    add_units(records, 351.0, Arm::C, 1, true, 4);   // tips over to 400
    add_units(records, -250.0, Arm::T, 1, true, 5);  // half away from zero
    add_units(records, -249.9, Arm::C, 1, true, 6);

    const std::vector<CovariateGroup> groups =
        group_by_covariate(records, BinningRule::equal_width(100));
    REQUIRE(groups.size() == 4);
    CHECK(groups[0].x_center == -300.0);
    CHECK(groups[1].x_center == -200.0);
    CHECK(groups[2].x_center == 300.0);
    CHECK(groups[3].x_center == 400.0);
    CHECK(groups[2].n == 3);
    CHECK(groups[3].n == 1);

    CHECK_THROWS_AS(BinningRule::equal_width(0.0), ValidationError);
    CHECK_THROWS_AS(BinningRule::equal_width(-5.0), ValidationError);
}

TEST_CASE("grouping demands a covariate on every record") {
    std::vector<UnitRecord> records = handmade_records();
    records[3].x.reset();
    CHECK_THROWS_AS(group_by_covariate(records), ValidationError);
    CHECK_THROWS_AS(group_by_covariate({}), ValidationError);
}

TEST_CASE("a one-armed group reports NaN and cannot be read as a stratum") {
    std::vector<UnitRecord> records;
    add_units(records, 100, Arm::T, 3, true, 7);
    const std::vector<CovariateGroup> groups = group_by_covariate(records);
    REQUIRE(groups.size() == 1);
    CHECK(groups[0].n_c == 0);
    CHECK(std::isnan(groups[0].survival_rate_c));
    CHECK_THROWS_AS(recover_principal_table(groups), ValidationError);
}

TEST_CASE("the full principal table comes back from clean records") {
    const RecoveredPopulation rec =
        recover_principal_table(group_by_covariate(handmade_records()));

    CHECK(!rec.low_confidence);
    for (const CovariateGroup& g : rec.groups) CHECK(!g.separation_warning);

    const PopulationSpec& pop = rec.population;
    CHECK(pop.spec(PrincipalStratum::LL).proportion == 0.2);
    CHECK(pop.spec(PrincipalStratum::LD).proportion == 0.4);
    CHECK(pop.spec(PrincipalStratum::DL).proportion == 0.2);
    CHECK(pop.spec(PrincipalStratum::DD).proportion == 0.2);
    CHECK(pop.spec(PrincipalStratum::LL).qol_t->mean == 900.0);
    CHECK(pop.spec(PrincipalStratum::LL).qol_c->mean == 700.0);
    CHECK(pop.spec(PrincipalStratum::LD).qol_t->mean == 600.0);
    CHECK(pop.spec(PrincipalStratum::DL).qol_c->mean == 800.0);
    CHECK(pop.spec(PrincipalStratum::DD).x->mean == 300.0);
    CHECK(!pop.spec(PrincipalStratum::DD).qol_t.has_value());

    REQUIRE(true_sace(pop).has_value());
    CHECK(*true_sace(pop) == 200.0);

    // Group annotations name the stratum each level was read as.
    REQUIRE(rec.groups.size() == 4);
    CHECK(*rec.groups[0].inferred_stratum == PrincipalStratum::DD);
    CHECK(*rec.groups[1].inferred_stratum == PrincipalStratum::LD);
    CHECK(*rec.groups[2].inferred_stratum == PrincipalStratum::LL);
    CHECK(*rec.groups[3].inferred_stratum == PrincipalStratum::DL);
}

TEST_CASE("groups reading as the same stratum merge with weighted means") {
    std::vector<UnitRecord> records;
    add_units(records, 100, Arm::T, 2, true, 10);
    add_units(records, 100, Arm::C, 2, true, 20);
    add_units(records, 200, Arm::T, 6, true, 30);
    add_units(records, 200, Arm::C, 6, true, 40);

    const RecoveredPopulation rec =
        recover_principal_table(group_by_covariate(records));
    const StratumSpec& ll = rec.population.spec(PrincipalStratum::LL);
    CHECK(ll.proportion == 1.0);
    CHECK(ll.x->mean == 175.0);      // (4*100 + 12*200) / 16
    CHECK(ll.qol_t->mean == 25.0);   // (4*10 + 12*30) / 16
    CHECK(ll.qol_c->mean == 35.0);
    CHECK(rec.population.spec(PrincipalStratum::LD).proportion == 0.0);
}

TEST_CASE("rates near the threshold trip the separation warning") {
    std::vector<UnitRecord> records;
    // T survival 1/2 sits exactly on the default threshold and well inside
    // the ambiguity band.
    add_units(records, 50, Arm::T, 2, true, 5);
    add_units(records, 50, Arm::T, 2, false);
    add_units(records, 50, Arm::C, 4, false);

    const RecoveredPopulation rec =
        recover_principal_table(group_by_covariate(records));
    CHECK(rec.low_confidence);
    REQUIRE(rec.groups.size() == 1);
    CHECK(rec.groups[0].separation_warning);
    // Rate exactly at the threshold reads as alive.
    CHECK(*rec.groups[0].inferred_stratum == PrincipalStratum::LD);

    // A higher threshold flips the same group to never-survivor.
    const RecoveredPopulation strict =
        recover_principal_table(group_by_covariate(records), 0.6);
    CHECK(*strict.groups[0].inferred_stratum == PrincipalStratum::DD);
}

TEST_CASE("a constant covariate cannot separate anything and says so") {
    // All four strata share x = 0: the single group mixes them, the read is
    // wrong by construction, and the warning is the only honest output.
    std::vector<UnitRecord> records;
    add_units(records, 0, Arm::T, 6, true, 700);
    add_units(records, 0, Arm::T, 4, false);
    add_units(records, 0, Arm::C, 4, true, 750);
    add_units(records, 0, Arm::C, 6, false);

    const RecoveredPopulation rec =
        recover_principal_table(group_by_covariate(records));
    CHECK(rec.low_confidence);
    CHECK(rec.groups[0].separation_warning);
    CHECK(*rec.groups[0].inferred_stratum == PrincipalStratum::LD);
    CHECK(!true_sace(rec.population).has_value());  // no always-survivors read
}

TEST_CASE("recovery rejects inconsistent or missing groups") {
    CHECK_THROWS_AS(recover_principal_table({}), ValidationError);
    CHECK_THROWS_AS(
        recover_principal_table(group_by_covariate(handmade_records()), 0.0),
        ValidationError);
    CHECK_THROWS_AS(
        recover_principal_table(group_by_covariate(handmade_records()), 1.5),
        ValidationError);

    CovariateGroup bad;
    bad.x_center = 1;
    bad.n = 5;  // but the arms only account for 4
    bad.n_t = 2;
    bad.n_c = 2;
    bad.survival_rate_t = 1.0;
    bad.survival_rate_c = 1.0;
    bad.mean_y_t = 1.0;
    bad.mean_y_c = 1.0;
    CHECK_THROWS_AS(recover_principal_table({bad}), ValidationError);
}

TEST_CASE("the answer does not depend on group order") {
    std::vector<CovariateGroup> groups = group_by_covariate(handmade_records());
    const RecoveredPopulation a = recover_principal_table(groups);
    std::reverse(groups.begin(), groups.end());
    const RecoveredPopulation b = recover_principal_table(groups);

    for (PrincipalStratum st : kAllStrata) {
        CHECK(a.population.spec(st).proportion == b.population.spec(st).proportion);
        CHECK(a.population.spec(st).qol_t.has_value() ==
              b.population.spec(st).qol_t.has_value());
        if (a.population.spec(st).qol_t)
            CHECK(a.population.spec(st).qol_t->mean ==
                  b.population.spec(st).qol_t->mean);
        if (a.population.spec(st).x)
            CHECK(a.population.spec(st).x->mean == b.population.spec(st).x->mean);
    }
    REQUIRE(a.groups.size() == b.groups.size());
    for (std::size_t i = 0; i < a.groups.size(); ++i)
        CHECK(a.groups[i].x_center == b.groups[i].x_center);  // canonical order
}

TEST_CASE("a noisy simulated covariate still recovers the table") {
    const PopulationSpec truth = fixtures::covariate_population(10.0);
    const std::vector<UnitRecord> records = assign_and_observe(truth, 10000, 42);
    const std::vector<CovariateGroup> groups =
        group_by_covariate(records, BinningRule::equal_width(100));

    REQUIRE(groups.size() == 4);  // x spread 10 never crosses a 50-wide gap
    CHECK(groups[0].x_center == 300.0);
    CHECK(groups[1].x_center == 500.0);
    CHECK(groups[2].x_center == 800.0);
    CHECK(groups[3].x_center == 900.0);

    const RecoveredPopulation rec = recover_principal_table(groups);
    CHECK(!rec.low_confidence);
    const PopulationSpec& pop = rec.population;
    CHECK(near(pop.spec(PrincipalStratum::LL).proportion, 0.2, 0.02));
    CHECK(near(pop.spec(PrincipalStratum::LD).proportion, 0.4, 0.02));
    CHECK(near(pop.spec(PrincipalStratum::DL).proportion, 0.2, 0.02));
    CHECK(near(pop.spec(PrincipalStratum::DD).proportion, 0.2, 0.02));

    // Outcome laws are point masses, so the recovered means are exact and
    // the implied always-survivor effect is exactly the truth.
    CHECK(pop.spec(PrincipalStratum::LL).qol_t->mean == 900.0);
    CHECK(pop.spec(PrincipalStratum::LL).qol_c->mean == 700.0);
    CHECK(*true_sace(pop) == 200.0);
}
