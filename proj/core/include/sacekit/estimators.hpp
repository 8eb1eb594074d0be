#pragma once

#include <limits>
#include <string>

#include "sacekit/discrete_dist.hpp"
#include "sacekit/trial.hpp"

namespace sacekit {

// One arm of the observed data, reduced to what the bound machinery needs:
// the within-arm survival rate and the outcome distribution among that
// arm's survivors.
struct ArmObservation {
    double survival_rate = 0.0;
    DiscreteDist survivor_dist;  // empty only when survival_rate == 0
};

// Extracts an ArmObservation from a summary. The survivor law must be
// discrete (point-mass components); summaries of continuous populations
// should go through simulated records instead.
ArmObservation arm_observation(const ObservedSummary& summary, Arm arm);

// Identification assumptions the analyst is willing to impose.
//   monotonicity: treatment never kills someone control would save (no DL).
//   stochastic_dominance: within each arm's survivor cell, always-survivors
//     fare at least as well on average as the cell's other stratum.
//   exclusion: carried for the instrumental-variable write-up only; the
//     bound machinery never reads it, because assignment obviously affects
//     the outcome through survival itself here.
struct AssumptionSet {
    bool monotonicity = false;
    bool stochastic_dominance = false;
    bool exclusion = false;
};

// How the dominance assumption is expressed when solving for the bounds.
// `mean` constrains only E[Y | always-survivor] per arm; `first_order`
// constrains the whole distribution. Both give the same bound endpoints
// (the extremal configurations - the top slice and the cell distribution
// itself - already satisfy the stronger ordering); the LP verifier accepts
// both so the equivalence is checked rather than assumed.
enum class DominanceForm { mean, first_order };

struct BoundOptions {
    int grid_points = 1001;  // resolution of the always-survivor share sweep
    DominanceForm dominance_form = DominanceForm::mean;
};

// Range of always-survivor shares compatible with the data and assumptions.
// open_lo marks a range whose infimum is approached but not attained (the
// share can be arbitrarily small but not zero).
struct PiRange {
    double lo = 0.0;
    double hi = 0.0;
    bool open_lo = false;
};

struct BoundsResult {
    double lower = std::numeric_limits<double>::quiet_NaN();
    double upper = std::numeric_limits<double>::quiet_NaN();
    AssumptionSet assumptions;
    PiRange pi_ll_range;
    bool feasible = false;
    std::string infeasible_reason;   // set only when !feasible
    std::string attained_at_lower;   // mass arrangement achieving each end
    std::string attained_at_upper;
};

// Difference of survivor mean outcomes, treated minus control. NOT a causal
// effect: the two survivor cells are different mixtures of latent strata
// (always-survivors diluted by LD on one side and DL on the other), so this
// compares different kinds of people, not the same people twice.
double naive_survivor_contrast(const ObservedSummary& summary);

// Instrumental-variable style ratio after imputing outcome 0 for the dead:
// (p_T * mean_T - p_C * mean_C) / (p_T - p_C). The imputation treats death
// as "quality of life zero", which is a scale choice, not a fact; the
// exclusion restriction it needs cannot hold when survival itself carries
// the effect. Reported as a foil, not an estimate.
double ive_zero_imputation(const ObservedSummary& summary);

// Partial-identification bounds on the survivor-causal effect. For each
// candidate always-survivor share pi, the treated survivor cell is a
// (pi/p_T, rest) mixture of always-survivor and LD outcomes, the control
// cell a (pi/p_C, rest) mixture with DL; the extremal always-survivor means
// at fixed pi are trimmed means of the observed survivor distributions, and
// the bound is the envelope over the feasible pi range. Monotonicity pins
// pi to p_C (and is infeasible when p_C > p_T); dominance floors each
// cell's always-survivor mean at the full cell mean.
BoundsResult sace_bounds(const ArmObservation& obs_t, const ArmObservation& obs_c,
                         const AssumptionSet& assumptions,
                         const BoundOptions& options = {});

// Independent verification route used by the tests: the extremal component
// means at each grid share are found by a linear program over the observed
// atoms (mass taken from each support point, capped by the cell's mass,
// summing to the share, optionally mean- or first-order-dominating the
// cell). Shares the result type, not the algorithm, with sace_bounds.
BoundsResult bounds_oracle(const ArmObservation& obs_t, const ArmObservation& obs_c,
                           const AssumptionSet& assumptions, int grid_points = 201,
                           DominanceForm dominance_form = DominanceForm::mean);

}  // namespace sacekit
