#include <benchmark/benchmark.h>

#include <vector>

#include "sacekit/estimators.hpp"
#include "sacekit/lp.hpp"
#include "sacekit/mixture.hpp"
#include "sacekit/rng.hpp"
#include "sacekit/strata.hpp"
#include "sacekit/trial.hpp"

namespace {

using namespace sacekit;

PopulationSpec reference_population() {
    PopulationSpec pop;
    pop.strata = {{
        {PrincipalStratum::LL, 0.2, NormalLaw{900, 0}, NormalLaw{700, 0}, {}},
        {PrincipalStratum::LD, 0.4, NormalLaw{600, 0}, std::nullopt, {}},
        {PrincipalStratum::DL, 0.2, std::nullopt, NormalLaw{800, 0}, {}},
        {PrincipalStratum::DD, 0.2, std::nullopt, std::nullopt, {}},
    }};
    return pop;
}

void bm_expected_summary(benchmark::State& state) {
    const PopulationSpec pop = reference_population();
    for (auto _ : state)
        benchmark::DoNotOptimize(expected_observed_summary(pop));
}
BENCHMARK(bm_expected_summary);

void bm_bounds_sweep(benchmark::State& state) {
    const ObservedSummary s = expected_observed_summary(reference_population());
    const ArmObservation obs_t = arm_observation(s, Arm::T);
    const ArmObservation obs_c = arm_observation(s, Arm::C);
    AssumptionSet assumptions;
    assumptions.stochastic_dominance = true;
    BoundOptions options;
    options.grid_points = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(sace_bounds(obs_t, obs_c, assumptions, options));
}
BENCHMARK(bm_bounds_sweep)->Arg(101)->Arg(1001)->Arg(10001);

void bm_lp_solve(benchmark::State& state) {
    // The per-grid-point subproblem the oracle solves: pick a survivor
    // sub-distribution of fixed mass maximizing the mean.
    lp::Problem problem;
    problem.objective = {600, 650, 700, 750, 800, 900};
    problem.maximize = true;
    lp::Constraint total;
    total.coeffs = {1, 1, 1, 1, 1, 1};
    total.rel = lp::Relation::eq;
    total.rhs = 0.4;
    problem.rows.push_back(total);
    for (std::size_t i = 0; i < 6; ++i) {
        lp::Constraint cap;
        cap.coeffs.assign(6, 0.0);
        cap.coeffs[i] = 1.0;
        cap.rel = lp::Relation::le;
        cap.rhs = 1.0 / 6.0;
        problem.rows.push_back(cap);
    }
    for (auto _ : state) benchmark::DoNotOptimize(lp::solve(problem));
}
BENCHMARK(bm_lp_solve);

void bm_simulate(benchmark::State& state) {
    const PopulationSpec pop = reference_population();
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(assign_and_observe(pop, n, 7));
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bm_simulate)->Arg(10000)->Arg(100000);

void bm_em_fit(benchmark::State& state) {
    SplitMix64 rng(19);
    std::vector<double> sample;
    sample.reserve(20000);
    for (int i = 0; i < 20000; ++i)
        sample.push_back(rng.uniform01() < 1.0 / 3.0 ? rng.normal(900, 70)
                                                     : rng.normal(600, 40));
    EmOptions options;
    options.restarts = 2;
    options.seed = 3;
    for (auto _ : state)
        benchmark::DoNotOptimize(em_fit(sample, 2, options));
}
BENCHMARK(bm_em_fit);

}  // namespace

BENCHMARK_MAIN();
