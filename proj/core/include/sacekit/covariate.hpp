#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sacekit/strata.hpp"
#include "sacekit/trial.hpp"

namespace sacekit {

// How covariate values are grouped. By default only exactly equal values
// share a group; a width w > 0 instead groups values by the nearest
// multiple of w, so clusters tighter than w land in one group apiece.
struct BinningRule {
    std::optional<double> width;

    static BinningRule exact() { return {}; }
    static BinningRule equal_width(double w);
};

// One covariate level with its within-group trial outcomes. Survival rates
// are per assigned arm; a rate is NaN when the group drew no units in that
// arm. Survivor means are absent when nobody in that cell survived.
struct CovariateGroup {
    double x_center = 0.0;
    std::int64_t n = 0;
    std::int64_t n_t = 0;
    std::int64_t n_c = 0;
    double survival_rate_t = 0.0;
    double survival_rate_c = 0.0;
    std::optional<double> mean_y_t;
    std::optional<double> mean_y_c;
    std::optional<PrincipalStratum> inferred_stratum;  // filled by recovery
    bool separation_warning = false;                   // filled by recovery
};

// Splits records by covariate level and summarizes each group. Every record
// must carry a covariate value. Groups come back sorted by x_center.
std::vector<CovariateGroup> group_by_covariate(
    const std::vector<UnitRecord>& records, const BinningRule& binning = {});

struct RecoveredPopulation {
    PopulationSpec population;
    // Input groups annotated with the stratum each was read as and with
    // separation warnings.
    std::vector<CovariateGroup> groups;
    bool low_confidence = false;  // some group sat in the warning band
};

// Reads each covariate group as a principal stratum: a group whose T-arm
// survival rate clears `threshold` is taken as alive under T, likewise for
// C, and the four live/dead combinations name the stratum. This leans on
// the covariate separating the strata; a group whose rate falls in the
// ambiguous band [0.2, 0.8] is flagged, and the whole answer is marked low
// confidence. Groups mapping to the same stratum merge with size-weighted
// means. Requires every group to have units in both arms.
RecoveredPopulation recover_principal_table(
    const std::vector<CovariateGroup>& groups, double threshold = 0.5);

}  // namespace sacekit
