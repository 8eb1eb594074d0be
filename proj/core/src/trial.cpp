#include "sacekit/trial.hpp"

#include <algorithm>
#include <sstream>

#include "sacekit/errors.hpp"
#include "sacekit/rng.hpp"

namespace sacekit {

double SurvivorLaw::mean() const {
    double m = 0.0;
    for (const Component& c : components) m += c.weight * c.law.mean;
    return m;
}

bool SurvivorLaw::is_discrete() const {
    return std::all_of(components.begin(), components.end(),
                       [](const Component& c) { return c.law.sd == 0.0; });
}

DiscreteDist SurvivorLaw::to_discrete() const {
    if (!is_discrete())
        throw ValidationError(
            "survivor law has a component with sd > 0; only point-mass "
            "mixtures convert to a discrete distribution");
    std::vector<DiscreteDist::Atom> atoms;
    atoms.reserve(components.size());
    for (const Component& c : components) atoms.push_back({c.law.mean, c.weight});
    return DiscreteDist::from_atoms(std::move(atoms));
}

std::array<PrincipalStratum, 2> classify_group(Arm z, Survival s_obs) {
    const bool alive = s_obs == Survival::alive;
    if (z == Arm::T)
        return alive ? std::array{PrincipalStratum::LL, PrincipalStratum::LD}
                     : std::array{PrincipalStratum::DL, PrincipalStratum::DD};
    return alive ? std::array{PrincipalStratum::LL, PrincipalStratum::DL}
                 : std::array{PrincipalStratum::LD, PrincipalStratum::DD};
}

namespace {

double draw_law(const NormalLaw& law, SplitMix64& rng) {
    return law.sd == 0.0 ? law.mean : rng.normal(law.mean, law.sd);
}

}  // namespace

std::vector<UnitRecord> assign_and_observe(const PopulationSpec& pop,
                                           std::int64_t n, std::uint64_t seed) {
    require_valid(pop);
    if (n <= 0 || n % 2 != 0)
        throw ValidationError(
            "sample size must be positive and even (complete randomization "
            "assigns exactly n/2 per arm)");

    // Complete randomization: half the slots are T, then Fisher-Yates over
    // the label vector with a dedicated stream.
    std::vector<Arm> arms(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n / 2; ++i) arms[static_cast<std::size_t>(i)] = Arm::T;
    for (std::int64_t i = n / 2; i < n; ++i) arms[static_cast<std::size_t>(i)] = Arm::C;
    SplitMix64 shuffle_rng(stream_seed(seed, kStreamAssignment));
    for (std::size_t i = arms.size() - 1; i > 0; --i)
        std::swap(arms[i], arms[shuffle_rng.below(i + 1)]);

    // Cumulative proportions over the canonical stratum order.
    std::array<double, 4> cumulative{};
    double running = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        running += pop.strata[i].proportion;
        cumulative[i] = running;
    }
    cumulative[3] = 1.0;  // guard the fp edge: the last bucket absorbs all

    std::vector<UnitRecord> records(static_cast<std::size_t>(n));
    for (std::int64_t id = 0; id < n; ++id) {
        const std::size_t i = static_cast<std::size_t>(id);
        SplitMix64 rng(stream_seed(seed, kStreamUnit, static_cast<std::uint64_t>(id)));

        const double u = rng.uniform01();
        std::size_t slot = 0;
        while (slot < 3 && u >= cumulative[slot]) ++slot;
        const StratumSpec& spec = pop.strata[slot];

        UnitRecord& rec = records[i];
        rec.id = id;
        rec.stratum = spec.stratum;
        rec.z = arms[i];
        if (spec.x) rec.x = draw_law(*spec.x, rng);
        rec.s_obs = survival_under(spec.stratum, rec.z);
        if (rec.s_obs == Survival::alive) {
            const std::optional<NormalLaw>& law =
                rec.z == Arm::T ? spec.qol_t : spec.qol_c;
            rec.y_obs = draw_law(*law, rng);
        }
    }
    return records;
}

ObservedSummary expected_observed_summary(const PopulationSpec& pop) {
    require_valid(pop);
    ObservedSummary summary;
    for (Arm arm : kBothArms) {
        double alive = 0.0;
        for (const StratumSpec& spec : pop.strata)
            if (survival_under(spec.stratum, arm) == Survival::alive)
                alive += spec.proportion;

        // Each arm receives half the sample, so cell shares are half the
        // within-arm probabilities.
        summary.cell(arm, Survival::alive).share = alive / 2.0;
        summary.cell(arm, Survival::dead).share = (1.0 - alive) / 2.0;

        if (alive <= 0.0) continue;
        SurvivorLaw law;
        for (const StratumSpec& spec : pop.strata) {
            if (spec.proportion <= 0.0) continue;
            if (survival_under(spec.stratum, arm) != Survival::alive) continue;
            const NormalLaw& qol = arm == Arm::T ? *spec.qol_t : *spec.qol_c;
            law.components.push_back({spec.proportion / alive, qol});
        }
        summary.cell(arm, Survival::alive).y = std::move(law);
    }
    return summary;
}

void require_consistent(const std::vector<UnitRecord>& records) {
    for (const UnitRecord& rec : records) {
        const bool alive = rec.s_obs == Survival::alive;
        if (alive != rec.y_obs.has_value()) {
            std::ostringstream msg;
            msg << "record " << rec.id
                << (alive ? " survived but has no outcome"
                          : " is dead but carries an outcome; quality of life "
                            "after death is undefined, not zero");
            throw ValidationError(msg.str());
        }
        if (rec.stratum && survival_under(*rec.stratum, rec.z) != rec.s_obs) {
            std::ostringstream msg;
            msg << "record " << rec.id << " is labeled " << to_string(*rec.stratum)
                << " under " << to_string(rec.z)
                << " but its observed survival contradicts that stratum";
            throw ValidationError(msg.str());
        }
    }
}

ObservedSummary empirical_summary(const std::vector<UnitRecord>& records) {
    if (records.empty()) throw ValidationError("no records to summarize");
    require_consistent(records);

    std::array<std::int64_t, 4> counts{};
    std::array<std::vector<double>, 2> survivor_values;  // by arm
    for (const UnitRecord& rec : records) {
        counts[ObservedSummary::index(rec.z, rec.s_obs)]++;
        if (rec.y_obs)
            survivor_values[static_cast<std::size_t>(rec.z == Arm::C)].push_back(
                *rec.y_obs);
    }

    const double n = static_cast<double>(records.size());
    ObservedSummary summary;
    for (std::size_t i = 0; i < 4; ++i)
        summary.cells[i].share = static_cast<double>(counts[i]) / n;

    for (Arm arm : kBothArms) {
        std::vector<double>& values =
            survivor_values[static_cast<std::size_t>(arm == Arm::C)];
        if (values.empty()) continue;
        // Observed values become point masses verbatim; the empirical
        // distribution is the data, not a model of it.
        DiscreteDist dist = DiscreteDist::from_samples(values);
        SurvivorLaw law;
        for (const DiscreteDist::Atom& a : dist.atoms())
            law.components.push_back({a.mass, NormalLaw{a.value, 0.0}});
        summary.cell(arm, Survival::alive).y = std::move(law);
    }
    return summary;
}

}  // namespace sacekit
