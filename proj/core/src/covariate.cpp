#include "sacekit/covariate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "sacekit/errors.hpp"

namespace sacekit {

BinningRule BinningRule::equal_width(double w) {
    if (!(w > 0.0) || !std::isfinite(w))
        throw ValidationError("bin width must be positive and finite");
    BinningRule rule;
    rule.width = w;
    return rule;
}

namespace {

struct GroupAcc {
    std::int64_t n = 0, n_t = 0, n_c = 0;
    std::int64_t alive_t = 0, alive_c = 0;
    double sum_y_t = 0.0, sum_y_c = 0.0;
};

}  // namespace

std::vector<CovariateGroup> group_by_covariate(
    const std::vector<UnitRecord>& records, const BinningRule& binning) {
    if (records.empty()) throw ValidationError("no records to group");
    require_consistent(records);

    std::map<double, GroupAcc> acc;
    for (const UnitRecord& rec : records) {
        if (!rec.x) {
            std::ostringstream msg;
            msg << "record " << rec.id
                << " has no covariate value; grouping needs one on every record";
            throw ValidationError(msg.str());
        }
        // Nearest-multiple binning keeps a cluster centered on a multiple of
        // the width inside one group (floor-style bins would split it).
        const double center =
            binning.width ? static_cast<double>(std::llround(*rec.x / *binning.width)) *
                                *binning.width
                          : *rec.x;
        GroupAcc& g = acc[center];
        g.n++;
        const bool alive = rec.s_obs == Survival::alive;
        if (rec.z == Arm::T) {
            g.n_t++;
            if (alive) {
                g.alive_t++;
                g.sum_y_t += *rec.y_obs;
            }
        } else {
            g.n_c++;
            if (alive) {
                g.alive_c++;
                g.sum_y_c += *rec.y_obs;
            }
        }
    }

    std::vector<CovariateGroup> groups;
    groups.reserve(acc.size());
    for (const auto& [center, g] : acc) {
        CovariateGroup out;
        out.x_center = center;
        out.n = g.n;
        out.n_t = g.n_t;
        out.n_c = g.n_c;
        out.survival_rate_t =
            g.n_t > 0 ? static_cast<double>(g.alive_t) / static_cast<double>(g.n_t)
                      : std::numeric_limits<double>::quiet_NaN();
        out.survival_rate_c =
            g.n_c > 0 ? static_cast<double>(g.alive_c) / static_cast<double>(g.n_c)
                      : std::numeric_limits<double>::quiet_NaN();
        if (g.alive_t > 0) out.mean_y_t = g.sum_y_t / static_cast<double>(g.alive_t);
        if (g.alive_c > 0) out.mean_y_c = g.sum_y_c / static_cast<double>(g.alive_c);
        groups.push_back(out);
    }
    return groups;
}

namespace {

PrincipalStratum stratum_for(bool alive_t, bool alive_c) {
    if (alive_t) return alive_c ? PrincipalStratum::LL : PrincipalStratum::LD;
    return alive_c ? PrincipalStratum::DL : PrincipalStratum::DD;
}

bool in_warning_band(double rate) { return rate >= 0.2 && rate <= 0.8; }

struct StratumAcc {
    std::int64_t n = 0;
    double sum_x = 0.0;
    double sum_y_t = 0.0;  // group-size weighted survivor means
    double sum_y_c = 0.0;
};

}  // namespace

RecoveredPopulation recover_principal_table(
    const std::vector<CovariateGroup>& groups, double threshold) {
    if (groups.empty()) throw ValidationError("no covariate groups to read");
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw ValidationError("survival threshold must lie in (0, 1]");

    // Canonical processing order, so the answer does not depend on how the
    // caller happened to arrange the groups.
    std::vector<CovariateGroup> sorted(groups);
    std::sort(sorted.begin(), sorted.end(),
              [](const CovariateGroup& a, const CovariateGroup& b) {
                  return a.x_center < b.x_center;
              });

    std::int64_t total = 0;
    for (const CovariateGroup& g : sorted) {
        if (g.n_t <= 0 || g.n_c <= 0) {
            std::ostringstream msg;
            msg << "covariate group at " << g.x_center
                << " lacks units in one arm; its survival cannot be read";
            throw ValidationError(msg.str());
        }
        if (g.n != g.n_t + g.n_c)
            throw ValidationError("covariate group arm counts do not add up");
        total += g.n;
    }

    RecoveredPopulation result;
    std::array<StratumAcc, 4> acc{};
    for (CovariateGroup g : sorted) {
        const bool alive_t = g.survival_rate_t >= threshold;
        const bool alive_c = g.survival_rate_c >= threshold;
        g.inferred_stratum = stratum_for(alive_t, alive_c);
        g.separation_warning = in_warning_band(g.survival_rate_t) ||
                               in_warning_band(g.survival_rate_c);
        if (g.separation_warning) result.low_confidence = true;

        StratumAcc& s = acc[static_cast<std::size_t>(*g.inferred_stratum)];
        s.n += g.n;
        s.sum_x += static_cast<double>(g.n) * g.x_center;
        if (alive_t) s.sum_y_t += static_cast<double>(g.n) * *g.mean_y_t;
        if (alive_c) s.sum_y_c += static_cast<double>(g.n) * *g.mean_y_c;
        result.groups.push_back(std::move(g));
    }

    for (std::size_t i = 0; i < 4; ++i) {
        StratumSpec& spec = result.population.strata[i];
        spec.stratum = kAllStrata[i];
        if (acc[i].n == 0) continue;
        const double nd = static_cast<double>(acc[i].n);
        spec.proportion = nd / static_cast<double>(total);
        spec.x = NormalLaw{acc[i].sum_x / nd, 0.0};
        if (survival_under(spec.stratum, Arm::T) == Survival::alive)
            spec.qol_t = NormalLaw{acc[i].sum_y_t / nd, 0.0};
        if (survival_under(spec.stratum, Arm::C) == Survival::alive)
            spec.qol_c = NormalLaw{acc[i].sum_y_c / nd, 0.0};
    }

    require_valid(result.population);
    return result;
}

}  // namespace sacekit
