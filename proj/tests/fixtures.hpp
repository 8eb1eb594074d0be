#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "sacekit/covariate.hpp"
#include "sacekit/estimators.hpp"
#include "sacekit/rng.hpp"
#include "sacekit/strata.hpp"
#include "sacekit/trial.hpp"

namespace fixtures {

using namespace sacekit;

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline StratumSpec make_stratum(PrincipalStratum st, double prop,
                                std::optional<NormalLaw> qol_t,
                                std::optional<NormalLaw> qol_c,
                                std::optional<NormalLaw> x = std::nullopt) {
    StratumSpec spec;
    spec.stratum = st;
    spec.proportion = prop;
    spec.qol_t = qol_t;
    spec.qol_c = qol_c;
    spec.x = x;
    return spec;
}

// The worked reference population used throughout: 20% always survivors
// (outcomes 900 treated / 700 control), 40% who survive only if treated
// (600), 20% who survive only under control (800), 20% who die either way.
// Always-survivor contrast 200; survival rates 0.6 treated, 0.4 control.
inline PopulationSpec discrete_population() {
    PopulationSpec pop;
    pop.strata = {
        make_stratum(PrincipalStratum::LL, 0.2, NormalLaw{900, 0}, NormalLaw{700, 0}),
        make_stratum(PrincipalStratum::LD, 0.4, NormalLaw{600, 0}, std::nullopt),
        make_stratum(PrincipalStratum::DL, 0.2, std::nullopt, NormalLaw{800, 0}),
        make_stratum(PrincipalStratum::DD, 0.2, std::nullopt, std::nullopt),
    };
    return pop;
}

// Same population with a pre-treatment covariate whose per-stratum centers
// (800 / 500 / 900 / 300) separate the strata when its spread is small.
inline PopulationSpec covariate_population(double x_sd = 0.0) {
    PopulationSpec pop = discrete_population();
    pop.spec(PrincipalStratum::LL).x = NormalLaw{800, x_sd};
    pop.spec(PrincipalStratum::LD).x = NormalLaw{500, x_sd};
    pop.spec(PrincipalStratum::DL).x = NormalLaw{900, x_sd};
    pop.spec(PrincipalStratum::DD).x = NormalLaw{300, x_sd};
    return pop;
}

// Continuous variant: same structure, normal outcome laws, so survivor
// cells become two-component normal mixtures.
inline PopulationSpec mixture_population() {
    PopulationSpec pop;
    pop.strata = {
        make_stratum(PrincipalStratum::LL, 0.2, NormalLaw{900, 70}, NormalLaw{700, 50}),
        make_stratum(PrincipalStratum::LD, 0.4, NormalLaw{600, 40}, std::nullopt),
        make_stratum(PrincipalStratum::DL, 0.2, std::nullopt, NormalLaw{800, 60}),
        make_stratum(PrincipalStratum::DD, 0.2, std::nullopt, std::nullopt),
    };
    return pop;
}

// Random valid population with point-mass outcome laws. The always-survivor
// proportion is kept at or above ll_floor; force_monotonicity empties DL,
// force_dominance orders each survivor cell so always-survivors do at least
// as well as their cell-mates.
inline PopulationSpec random_point_population(SplitMix64& rng,
                                              double ll_floor = 0.05,
                                              bool force_monotonicity = false,
                                              bool force_dominance = false) {
    double raw[4];
    double total = 0.0;
    for (double& r : raw) {
        r = rng.uniform01() + 1e-3;
        total += r;
    }
    double prop[4];
    for (int i = 0; i < 4; ++i) prop[i] = (1.0 - ll_floor) * raw[i] / total;
    prop[0] += ll_floor;
    if (force_monotonicity) {
        prop[3] += prop[2];
        prop[2] = 0.0;
    }

    const auto value = [&] { return static_cast<double>(rng.below(2001)) / 2.0; };
    double ll_t = value(), ll_c = value(), ld_t = value(), dl_c = value();
    if (force_dominance) {
        if (ll_t < ld_t) std::swap(ll_t, ld_t);
        if (ll_c < dl_c) std::swap(ll_c, dl_c);
    }

    PopulationSpec pop;
    pop.strata = {
        make_stratum(PrincipalStratum::LL, prop[0], NormalLaw{ll_t, 0},
                     NormalLaw{ll_c, 0}),
        make_stratum(PrincipalStratum::LD, prop[1], NormalLaw{ld_t, 0},
                     std::nullopt),
        make_stratum(PrincipalStratum::DL, prop[2], std::nullopt,
                     prop[2] > 0.0 ? std::optional<NormalLaw>(NormalLaw{dl_c, 0})
                                   : std::nullopt),
        make_stratum(PrincipalStratum::DD, prop[3], std::nullopt, std::nullopt),
    };
    return pop;
}

// Random discrete survivor distribution with 1..max_atoms support points.
inline DiscreteDist random_dist(SplitMix64& rng, int max_atoms = 6) {
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_atoms)));
    std::vector<DiscreteDist::Atom> atoms;
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        // Distinct-ish values; duplicates just merge.
        const double v = static_cast<double>(rng.below(100)) * 10.0 +
                         static_cast<double>(rng.below(10));
        const double m = rng.uniform01() + 0.05;
        atoms.push_back({v, m});
        total += m;
    }
    for (DiscreteDist::Atom& a : atoms) a.mass /= total;
    return DiscreteDist::from_atoms(std::move(atoms));
}

inline ArmObservation random_arm_observation(SplitMix64& rng, int max_atoms = 6) {
    ArmObservation obs;
    obs.survival_rate = 0.1 + 0.9 * rng.uniform01();
    obs.survivor_dist = random_dist(rng, max_atoms);
    return obs;
}

}  // namespace fixtures
