#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sacekit/strata.hpp"

namespace sacekit {

struct NormalComponent {
    double weight = 0.0;
    double mean = 0.0;
    double sd = 1.0;
};

struct EmOptions {
    int restarts = 10;
    int max_iterations = 2000;
    // Relative log-likelihood change declaring convergence:
    // |ll - prev| <= tolerance * (1 + |ll|).
    double tolerance = 1e-8;
    std::uint64_t seed = 0;
    // Variance floor as a multiple of the sample variance, so no component
    // collapses onto a single point.
    double variance_floor_factor = 1e-6;
};

struct MixtureFit {
    std::vector<NormalComponent> components;  // sorted by ascending mean
    double loglik = 0.0;
    int iterations = 0;
    bool converged = false;
    int restarts_used = 0;
    // Log-likelihood after each EM pass of the winning restart. EM
    // guarantees this never decreases; tests hold it to that.
    std::vector<double> loglik_trace;
};

// Fits a k-component univariate normal mixture by EM. Deterministic in
// (samples, k, options): restart 0 initializes means at sample quantiles,
// later restarts at sample points drawn from a stream derived from
// options.seed; the winner is the highest log-likelihood, ties going to the
// earlier restart. Requires at least 10 * k samples with nonzero variance.
MixtureFit em_fit(const std::vector<double>& samples, int k,
                  const EmOptions& options = {});

// One consistent assignment of mixture components to latent strata.
struct StrataSolution {
    std::array<double, 4> pi{};  // proportions in LL, LD, DL, DD order
    int t_ll_component = 0;      // index into the treated fit's components
    int c_ll_component = 0;      // index into the control fit's components
    double pi_t_candidate = 0.0; // always-survivor share seen from the T side
    double pi_c_candidate = 0.0; // ... and from the C side
};

struct StrataIdentification {
    std::vector<StrataSolution> solutions;
    bool ambiguous = false;  // more than one matching survived
};

// Cross-arm reconstruction of the stratum proportions. Treated survivors
// mix always-survivors with LD, control survivors mix them with DL; scaled
// by the survival rates, the always-survivor share must appear in both
// cells' component weights, so candidates are matched across arms within
// `tol` (relative, plus a tiny absolute slack for exact inputs). Components
// with weight below 0.01 are treated as absent (the cell holds a single
// stratum). Throws InfeasibleError when every match implies a negative
// proportion, IdentificationError when nothing matches at all.
StrataIdentification identify_strata(const MixtureFit& fit_t,
                                     const MixtureFit& fit_c, double p_t,
                                     double p_c, double tol = 0.05);

// Always-survivor effect implied by each surviving solution: the matched
// treated component's mean minus the matched control component's mean.
// Sorted ascending, exact duplicates collapsed.
std::vector<double> sace_candidates(const StrataIdentification& ident,
                                    const MixtureFit& fit_t,
                                    const MixtureFit& fit_c);

}  // namespace sacekit
