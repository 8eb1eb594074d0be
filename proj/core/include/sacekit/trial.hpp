#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "sacekit/discrete_dist.hpp"
#include "sacekit/strata.hpp"

namespace sacekit {

// One trial participant. `stratum` is the latent label: filled for simulated
// units, absent for externally ingested records (reality never shows it).
// y_obs is present exactly when the unit survived; quality of life after
// death is not zero, it is undefined.
struct UnitRecord {
    std::int64_t id = 0;
    std::optional<PrincipalStratum> stratum;
    std::optional<double> x;
    Arm z = Arm::T;
    Survival s_obs = Survival::dead;
    std::optional<double> y_obs;
};

// Finite mixture of normal laws. When every component has sd == 0 this is a
// finite discrete distribution (the regime of the worked tables) and
// converts exactly to one.
struct SurvivorLaw {
    struct Component {
        double weight = 0.0;
        NormalLaw law;
    };
    std::vector<Component> components;

    double mean() const;
    bool is_discrete() const;
    DiscreteDist to_discrete() const;  // requires is_discrete()
};

// What a trial shows, cell by cell: share of the whole sample landing in
// each (assignment, survival) cell, plus the outcome law among survivors.
// Cells are indexed (T,alive), (T,dead), (C,alive), (C,dead).
struct ObservedSummary {
    struct Cell {
        double share = 0.0;
        std::optional<SurvivorLaw> y;  // survivor cells with share > 0 only
    };

    std::array<Cell, 4> cells{};

    Cell& cell(Arm z, Survival s) { return cells[index(z, s)]; }
    const Cell& cell(Arm z, Survival s) const { return cells[index(z, s)]; }

    static std::size_t index(Arm z, Survival s) {
        return 2 * static_cast<std::size_t>(z == Arm::C) +
               static_cast<std::size_t>(s == Survival::dead);
    }
};

// The latent strata an observed (assignment, survival) cell can contain.
// Observation only reveals this two-way ambiguity, never the stratum itself:
// treated survivors mix LL with LD, control survivors mix LL with DL.
std::array<PrincipalStratum, 2> classify_group(Arm z, Survival s_obs);

// Simulates a completely randomized trial: exactly n/2 units per arm, strata
// drawn from the population proportions, outcomes from the stratum laws.
// Deterministic in (pop, n, seed); each unit draws from its own substream
// keyed by (seed, id), so no record depends on evaluation order. n must be
// positive and even.
std::vector<UnitRecord> assign_and_observe(const PopulationSpec& pop,
                                           std::int64_t n, std::uint64_t seed);

// Infinite-sample limit of the observed table: exact cell shares and exact
// survivor mixtures, no sampling anywhere.
ObservedSummary expected_observed_summary(const PopulationSpec& pop);

// Finite-sample observed table. Survivor outcome values are kept exactly
// (point-mass components), so downstream estimators see the data verbatim.
ObservedSummary empirical_summary(const std::vector<UnitRecord>& records);

// Throws ValidationError unless y_obs is present exactly on survivors and,
// when a latent stratum is present, s_obs matches what that stratum implies
// under z.
void require_consistent(const std::vector<UnitRecord>& records);

}  // namespace sacekit
