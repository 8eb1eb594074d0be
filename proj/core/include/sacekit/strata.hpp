#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sacekit {

enum class Arm { T, C };

enum class Survival { alive, dead };

// Latent stratum of a unit, defined by its pair of survival potential
// outcomes: the first letter is survival if treated, the second if control.
// LL units live either way ("always survivors"); only they have both
// quality-of-life potential outcomes defined, so the survivor-causal effect
// is an LL-only contrast.
enum class PrincipalStratum { LL, LD, DL, DD };

inline constexpr std::array<PrincipalStratum, 4> kAllStrata = {
    PrincipalStratum::LL, PrincipalStratum::LD, PrincipalStratum::DL,
    PrincipalStratum::DD};

inline constexpr std::array<Arm, 2> kBothArms = {Arm::T, Arm::C};

Survival survival_under(PrincipalStratum s, Arm arm);

const char* to_string(PrincipalStratum s);
const char* to_string(Arm a);
const char* to_string(Survival s);

std::optional<PrincipalStratum> stratum_from_string(std::string_view text);
std::optional<Arm> arm_from_string(std::string_view text);

// Normal outcome law; sd == 0 denotes a point mass, which is how the
// worked tables with degenerate (sd-free) outcomes are represented.
struct NormalLaw {
    double mean = 0.0;
    double sd = 0.0;
};

// One latent stratum of the population. A quality-of-life law may be present
// only for the arms the stratum survives under; a dead cell has no outcome
// ("*" in the serialized form). The optional covariate law describes a
// pre-treatment characteristic X, untouched by assignment.
struct StratumSpec {
    PrincipalStratum stratum = PrincipalStratum::LL;
    double proportion = 0.0;
    std::optional<NormalLaw> qol_t;
    std::optional<NormalLaw> qol_c;
    std::optional<NormalLaw> x;
};

// Ground-truth latent population. Slot i always describes kAllStrata[i];
// validate() flags mislabeled slots. SUTVA is a global modeling assumption
// of this type: one unit's potential outcomes never depend on another
// unit's assignment, so the population is fully described per stratum.
struct PopulationSpec {
    std::array<StratumSpec, 4> strata{};

    const StratumSpec& spec(PrincipalStratum s) const {
        return strata[static_cast<std::size_t>(s)];
    }
    StratumSpec& spec(PrincipalStratum s) {
        return strata[static_cast<std::size_t>(s)];
    }
};

struct ValidationReport {
    bool pass = true;
    std::vector<std::string> violations;
};

inline constexpr double kProportionTolerance = 1e-12;

// Checks the population invariants: slot labels in canonical order,
// proportions nonnegative and summing to 1 within kProportionTolerance
// (no silent renormalization), outcome laws present exactly on the cells a
// stratum survives in, and no negative sds. Strata with zero proportion may
// omit laws on their live cells (nothing is ever drawn from them); laws on
// dead cells are rejected even at zero weight.
ValidationReport validate(const PopulationSpec& pop);

// Throws ValidationError listing every violation found by validate().
void require_valid(const PopulationSpec& pop);

// Mean quality-of-life difference, treated minus control, among always
// survivors. Empty when the LL stratum has zero proportion: with nobody
// alive under both arms the contrast does not exist (it is NOT zero).
std::optional<double> true_sace(const PopulationSpec& pop);

// Fraction of the population alive under the given arm.
double true_survival_rate(const PopulationSpec& pop, Arm arm);

}  // namespace sacekit
