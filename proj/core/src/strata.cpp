#include "sacekit/strata.hpp"

#include <cmath>
#include <sstream>

#include "sacekit/errors.hpp"

namespace sacekit {

Survival survival_under(PrincipalStratum s, Arm arm) {
    switch (s) {
        case PrincipalStratum::LL: return Survival::alive;
        case PrincipalStratum::LD:
            return arm == Arm::T ? Survival::alive : Survival::dead;
        case PrincipalStratum::DL:
            return arm == Arm::T ? Survival::dead : Survival::alive;
        case PrincipalStratum::DD: return Survival::dead;
    }
    return Survival::dead;  // unreachable
}

const char* to_string(PrincipalStratum s) {
    switch (s) {
        case PrincipalStratum::LL: return "LL";
        case PrincipalStratum::LD: return "LD";
        case PrincipalStratum::DL: return "DL";
        case PrincipalStratum::DD: return "DD";
    }
    return "??";
}

const char* to_string(Arm a) { return a == Arm::T ? "T" : "C"; }

const char* to_string(Survival s) { return s == Survival::alive ? "L" : "D"; }

std::optional<PrincipalStratum> stratum_from_string(std::string_view text) {
    for (PrincipalStratum s : kAllStrata)
        if (text == to_string(s)) return s;
    return std::nullopt;
}

std::optional<Arm> arm_from_string(std::string_view text) {
    if (text == "T") return Arm::T;
    if (text == "C") return Arm::C;
    return std::nullopt;
}

namespace {

void check_law(const StratumSpec& spec, Arm arm, ValidationReport& report) {
    const std::optional<NormalLaw>& law = arm == Arm::T ? spec.qol_t : spec.qol_c;
    const bool alive = survival_under(spec.stratum, arm) == Survival::alive;
    std::ostringstream msg;
    if (law && !alive) {
        msg << to_string(spec.stratum) << " has a qol_" << (arm == Arm::T ? "t" : "c")
            << " law but is dead under " << to_string(arm)
            << " (dead cells have no outcome)";
        report.violations.push_back(msg.str());
    } else if (!law && alive && spec.proportion > 0.0) {
        msg << to_string(spec.stratum) << " is alive under " << to_string(arm)
            << " with positive proportion but has no qol_"
            << (arm == Arm::T ? "t" : "c") << " law";
        report.violations.push_back(msg.str());
    } else if (law && law->sd < 0.0) {
        msg << to_string(spec.stratum) << " qol_" << (arm == Arm::T ? "t" : "c")
            << " has negative sd " << law->sd;
        report.violations.push_back(msg.str());
    }
}

}  // namespace

ValidationReport validate(const PopulationSpec& pop) {
    ValidationReport report;
    for (std::size_t i = 0; i < pop.strata.size(); ++i) {
        if (pop.strata[i].stratum != kAllStrata[i]) {
            std::ostringstream msg;
            msg << "slot " << i << " must describe " << to_string(kAllStrata[i])
                << " but is labeled " << to_string(pop.strata[i].stratum);
            report.violations.push_back(msg.str());
        }
    }

    double sum = 0.0;
    for (const StratumSpec& spec : pop.strata) {
        if (spec.proportion < 0.0) {
            std::ostringstream msg;
            msg << to_string(spec.stratum) << " proportion " << spec.proportion
                << " is negative";
            report.violations.push_back(msg.str());
        }
        sum += spec.proportion;
    }
    if (std::abs(sum - 1.0) > kProportionTolerance) {
        std::ostringstream msg;
        msg << "stratum proportions sum to " << sum << ", not 1";
        report.violations.push_back(msg.str());
    }

    for (const StratumSpec& spec : pop.strata) {
        check_law(spec, Arm::T, report);
        check_law(spec, Arm::C, report);
        if (spec.x && spec.x->sd < 0.0) {
            std::ostringstream msg;
            msg << to_string(spec.stratum) << " covariate law has negative sd "
                << spec.x->sd;
            report.violations.push_back(msg.str());
        }
    }

    report.pass = report.violations.empty();
    return report;
}

void require_valid(const PopulationSpec& pop) {
    ValidationReport report = validate(pop);
    if (report.pass) return;
    std::string joined = "invalid population:";
    for (const std::string& v : report.violations) joined += "\n  - " + v;
    throw ValidationError(joined);
}

std::optional<double> true_sace(const PopulationSpec& pop) {
    require_valid(pop);
    const StratumSpec& ll = pop.spec(PrincipalStratum::LL);
    if (ll.proportion <= 0.0) return std::nullopt;
    return ll.qol_t->mean - ll.qol_c->mean;
}

double true_survival_rate(const PopulationSpec& pop, Arm arm) {
    require_valid(pop);
    double rate = 0.0;
    for (const StratumSpec& spec : pop.strata)
        if (survival_under(spec.stratum, arm) == Survival::alive)
            rate += spec.proportion;
    return rate;
}

}  // namespace sacekit
