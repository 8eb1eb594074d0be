#include "sacekit/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sacekit/errors.hpp"
#include "sacekit/lp.hpp"

namespace sacekit {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void check_arm(const ArmObservation& obs, Arm arm) {
    if (!(obs.survival_rate >= 0.0 && obs.survival_rate <= 1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "survival rate under " << to_string(arm) << " is "
            << obs.survival_rate << ", outside [0, 1]";
        throw ValidationError(msg.str());
    }
    if (obs.survival_rate > 0.0 && obs.survivor_dist.empty()) {
        std::ostringstream msg;
        msg << "arm " << to_string(arm)
            << " has survivors but no survivor outcome distribution";
        throw ValidationError(msg.str());
    }
}

void require_positive_rates(double p_t, double p_c) {
    if (p_t <= 0.0 || p_c <= 0.0) {
        std::ostringstream msg;
        msg << "survival rate under " << (p_t <= 0.0 ? "T" : "C")
            << " is zero, so no unit survives both arms and the "
               "survivor-causal effect is undefined";
        throw UndefinedSaceError(msg.str());
    }
}

double clamped_fraction(double pi, double p) {
    return std::min(pi / p, 1.0);
}

}  // namespace

ArmObservation arm_observation(const ObservedSummary& summary, Arm arm) {
    const ObservedSummary::Cell& alive = summary.cell(arm, Survival::alive);
    const ObservedSummary::Cell& dead = summary.cell(arm, Survival::dead);
    const double total = alive.share + dead.share;
    if (total <= 0.0) {
        std::ostringstream msg;
        msg << "no units assigned to arm " << to_string(arm);
        throw ValidationError(msg.str());
    }
    ArmObservation obs;
    obs.survival_rate = alive.share / total;
    if (alive.share > 0.0) {
        if (!alive.y) {
            std::ostringstream msg;
            msg << "survivor cell under " << to_string(arm)
                << " has positive share but no outcome law";
            throw ValidationError(msg.str());
        }
        obs.survivor_dist = alive.y->to_discrete();
    }
    return obs;
}

double naive_survivor_contrast(const ObservedSummary& summary) {
    const ObservedSummary::Cell& t = summary.cell(Arm::T, Survival::alive);
    const ObservedSummary::Cell& c = summary.cell(Arm::C, Survival::alive);
    if (t.share <= 0.0 || c.share <= 0.0 || !t.y || !c.y)
        throw EstimationError(
            "naive survivor contrast needs survivors in both arms");
    return t.y->mean() - c.y->mean();
}

double ive_zero_imputation(const ObservedSummary& summary) {
    double p[2], mean_y[2];
    for (Arm arm : kBothArms) {
        const ObservedSummary::Cell& alive = summary.cell(arm, Survival::alive);
        const ObservedSummary::Cell& dead = summary.cell(arm, Survival::dead);
        const double total = alive.share + dead.share;
        if (total <= 0.0) {
            std::ostringstream msg;
            msg << "no units assigned to arm " << to_string(arm);
            throw ValidationError(msg.str());
        }
        const std::size_t i = static_cast<std::size_t>(arm == Arm::C);
        p[i] = alive.share / total;
        if (alive.share > 0.0 && !alive.y) {
            std::ostringstream msg;
            msg << "survivor cell under " << to_string(arm)
                << " has positive share but no outcome law";
            throw ValidationError(msg.str());
        }
        mean_y[i] = alive.share > 0.0 ? alive.y->mean() : 0.0;
    }
    const double denom = p[0] - p[1];
    if (std::abs(denom) <= 1e-12)
        throw EstimationError(
            "zero-imputed IVE is undefined: the survival rates are equal, "
            "so the instrument does not move the imputed outcome's support");
    return (p[0] * mean_y[0] - p[1] * mean_y[1]) / denom;
}

namespace {

// Extremal always-survivor means for one arm at share fraction omega.
// Largest: the top omega slice of the survivor cell. Smallest: the bottom
// slice, unless dominance floors the always-survivor mean at the cell mean
// (in which case the floor is attained by taking the cell distribution
// itself, which is feasible at every omega).
struct ArmExtremes {
    double lo = 0.0;
    double hi = 0.0;
};

ArmExtremes arm_extremes(const DiscreteDist& dist, double omega, bool dominance) {
    ArmExtremes e;
    e.hi = dist.top_trimmed_mean(omega);
    e.lo = dominance ? dist.mean() : dist.bottom_trimmed_mean(omega);
    return e;
}

std::string side_hi(double omega) {
    return omega == 0.0 ? std::string("max support value (top slice -> 0)")
                        : "top slice of fraction " + fmt(omega);
}

std::string side_lo(double omega, bool dominance) {
    if (dominance) return "cell mean floor (dominance)";
    return omega == 0.0 ? std::string("min support value (bottom slice -> 0)")
                        : "bottom slice of fraction " + fmt(omega);
}

}  // namespace

BoundsResult sace_bounds(const ArmObservation& obs_t, const ArmObservation& obs_c,
                         const AssumptionSet& assumptions,
                         const BoundOptions& options) {
    check_arm(obs_t, Arm::T);
    check_arm(obs_c, Arm::C);
    if (options.grid_points < 2)
        throw ValidationError("grid must have at least 2 points");
    const double p_t = obs_t.survival_rate;
    const double p_c = obs_c.survival_rate;
    require_positive_rates(p_t, p_c);

    BoundsResult res;
    res.assumptions = assumptions;
    const bool dom = assumptions.stochastic_dominance;

    if (assumptions.monotonicity) {
        // No DL stratum: control survivors are exactly the always-survivors,
        // so their share is pinned to p_C and the control side is untrimmed.
        res.pi_ll_range = {p_c, p_c, false};
        if (p_c > p_t + 1e-12) {
            res.feasible = false;
            res.infeasible_reason =
                "monotonicity pins the always-survivor share to p_C = " +
                fmt(p_c) + ", which exceeds p_T = " + fmt(p_t) +
                "; the data contradict the assumption";
            return res;
        }
        const double pi = std::min(p_c, p_t);
        const double w_t = clamped_fraction(pi, p_t);
        const ArmExtremes t = arm_extremes(obs_t.survivor_dist, w_t, dom);
        const double c_mean = obs_c.survivor_dist.mean();

        res.feasible = true;
        res.lower = t.lo - c_mean;
        res.upper = t.hi - c_mean;
        res.attained_at_lower = "pi_ll = " + fmt(pi) + "; T side: " +
                                side_lo(w_t, dom) + "; C side: whole survivor cell";
        res.attained_at_upper = "pi_ll = " + fmt(pi) + "; T side: " +
                                side_hi(w_t) + "; C side: whole survivor cell";
        return res;
    }

    // Without monotonicity the share can sit anywhere in (0, min(p_T, p_C)].
    // Both envelope ends are monotone in the share (shrinking the slice can
    // only widen what trimming achieves), so the extremes live in the
    // pi -> 0+ limit; the grid sweep double-checks that argument numerically
    // rather than trusting it.
    const double pi_max = std::min(p_t, p_c);
    res.pi_ll_range = {0.0, pi_max, true};
    res.feasible = true;

    const ArmExtremes t0 = arm_extremes(obs_t.survivor_dist, 0.0, dom);
    const ArmExtremes c0 = arm_extremes(obs_c.survivor_dist, 0.0, dom);
    res.upper = t0.hi - c0.lo;
    res.lower = t0.lo - c0.hi;
    res.attained_at_upper = "pi_ll -> 0+; T side: " + side_hi(0.0) +
                            "; C side: " + side_lo(0.0, dom);
    res.attained_at_lower = "pi_ll -> 0+; T side: " + side_lo(0.0, dom) +
                            "; C side: " + side_hi(0.0);

    for (int k = 1; k <= options.grid_points; ++k) {
        const double pi = pi_max * k / options.grid_points;
        const double w_t = clamped_fraction(pi, p_t);
        const double w_c = clamped_fraction(pi, p_c);
        const ArmExtremes t = arm_extremes(obs_t.survivor_dist, w_t, dom);
        const ArmExtremes c = arm_extremes(obs_c.survivor_dist, w_c, dom);
        if (t.hi - c.lo > res.upper) {
            res.upper = t.hi - c.lo;
            res.attained_at_upper = "pi_ll = " + fmt(pi) + "; T side: " +
                                    side_hi(w_t) + "; C side: " + side_lo(w_c, dom);
        }
        if (t.lo - c.hi < res.lower) {
            res.lower = t.lo - c.hi;
            res.attained_at_lower = "pi_ll = " + fmt(pi) + "; T side: " +
                                    side_lo(w_t, dom) + "; C side: " + side_hi(w_c);
        }
    }
    return res;
}

namespace {

// Extremal mean of the mass a hidden subgroup of size omega can occupy
// inside a cell distribution, posed as a linear program: take g_i from atom
// i, 0 <= g_i <= mass_i, sum g_i = omega, optionally dominating the cell in
// mean or in first order. Independent of the trimming shortcut on purpose.
double lp_extremal_mean(const DiscreteDist& dist, double omega, bool maximize,
                        bool dominance, DominanceForm form) {
    const std::vector<DiscreteDist::Atom>& atoms = dist.atoms();
    const std::size_t n = atoms.size();

    lp::Problem problem;
    problem.maximize = maximize;
    problem.objective.resize(n);
    for (std::size_t i = 0; i < n; ++i) problem.objective[i] = atoms[i].value;

    problem.rows.push_back({std::vector<double>(n, 1.0), lp::Relation::eq, omega});
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(n, 0.0);
        row[i] = 1.0;
        problem.rows.push_back({std::move(row), lp::Relation::le, atoms[i].mass});
    }
    if (dominance) {
        if (form == DominanceForm::mean) {
            std::vector<double> row(n);
            for (std::size_t i = 0; i < n; ++i) row[i] = atoms[i].value;
            problem.rows.push_back(
                {std::move(row), lp::Relation::ge, omega * dist.mean()});
        } else {
            // First-order dominance of the subgroup over the cell: the
            // subgroup's cdf may never exceed the cell's at any cut between
            // atoms, i.e. prefix sums of g stay below omega * F(cut).
            double cdf = 0.0;
            for (std::size_t k = 0; k + 1 < n; ++k) {
                cdf += atoms[k].mass;
                std::vector<double> row(n, 0.0);
                for (std::size_t i = 0; i <= k; ++i) row[i] = 1.0;
                problem.rows.push_back({std::move(row), lp::Relation::le, omega * cdf});
            }
        }
    }

    const lp::Solution sol = lp::solve(problem);
    if (sol.status != lp::Status::optimal)
        throw EstimationError("bound verification LP failed to solve");
    return sol.objective / omega;
}

}  // namespace

BoundsResult bounds_oracle(const ArmObservation& obs_t, const ArmObservation& obs_c,
                           const AssumptionSet& assumptions, int grid_points,
                           DominanceForm dominance_form) {
    check_arm(obs_t, Arm::T);
    check_arm(obs_c, Arm::C);
    if (grid_points < 2) throw ValidationError("grid must have at least 2 points");
    const double p_t = obs_t.survival_rate;
    const double p_c = obs_c.survival_rate;
    require_positive_rates(p_t, p_c);

    BoundsResult res;
    res.assumptions = assumptions;
    const bool dom = assumptions.stochastic_dominance;

    const auto eval = [&](double pi) {
        const double w_t = clamped_fraction(pi, p_t);
        const double w_c = clamped_fraction(pi, p_c);
        const double hi_t = lp_extremal_mean(obs_t.survivor_dist, w_t, true, dom,
                                             dominance_form);
        const double lo_t = lp_extremal_mean(obs_t.survivor_dist, w_t, false, dom,
                                             dominance_form);
        const double hi_c = lp_extremal_mean(obs_c.survivor_dist, w_c, true, dom,
                                             dominance_form);
        const double lo_c = lp_extremal_mean(obs_c.survivor_dist, w_c, false, dom,
                                             dominance_form);
        return std::pair{lo_t - hi_c, hi_t - lo_c};  // lower, upper at this pi
    };

    if (assumptions.monotonicity) {
        res.pi_ll_range = {p_c, p_c, false};
        if (p_c > p_t + 1e-12) {
            res.feasible = false;
            res.infeasible_reason =
                "monotonicity pins the always-survivor share to p_C = " +
                fmt(p_c) + ", which exceeds p_T = " + fmt(p_t);
            return res;
        }
        const double pi = std::min(p_c, p_t);
        const auto [lo, hi] = eval(pi);
        res.feasible = true;
        res.lower = lo;
        res.upper = hi;
        res.attained_at_lower = "lp at pi_ll = p_C = " + fmt(pi);
        res.attained_at_upper = res.attained_at_lower;
        return res;
    }

    const double pi_max = std::min(p_t, p_c);
    res.pi_ll_range = {0.0, pi_max, true};
    res.feasible = true;

    // Stand-in for the open pi -> 0+ end: any share at or below half the
    // smallest extreme-atom capacity already reaches the limiting slice, so
    // the LP at this share equals the limit exactly.
    const auto edge_mass = [](const DiscreteDist& d) {
        return std::min(d.atoms().front().mass, d.atoms().back().mass);
    };
    const double pi_eps =
        0.5 * std::min(p_t * edge_mass(obs_t.survivor_dist),
                       p_c * edge_mass(obs_c.survivor_dist));

    bool first = true;
    for (int k = 0; k <= grid_points; ++k) {
        const double pi = k == 0 ? pi_eps : pi_max * k / grid_points;
        if (pi <= 0.0) continue;
        const auto [lo, hi] = eval(pi);
        if (first || hi > res.upper) {
            res.upper = hi;
            res.attained_at_upper = "lp at pi_ll = " + fmt(pi);
        }
        if (first || lo < res.lower) {
            res.lower = lo;
            res.attained_at_lower = "lp at pi_ll = " + fmt(pi);
        }
        first = false;
    }
    return res;
}

}  // namespace sacekit
