#include "cli_app.hpp"

#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sacekit/covariate.hpp"
#include "sacekit/errors.hpp"
#include "sacekit/io.hpp"
#include "sacekit/mixture.hpp"
#include "sacekit/strata.hpp"
#include "sacekit/trial.hpp"

namespace sacekit::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

// Human tables round to 10 significant digits, which folds float dust
// (-149.99999999999997 prints as -150) without hiding real digits. JSON
// output goes through the library's shortest-round-trip serializer instead.
std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string law_str(const std::optional<NormalLaw>& law) {
    if (!law) return "*";
    if (law->sd == 0.0) return num(law->mean);
    return "N(" + num(law->mean) + ", " + num(law->sd) + ")";
}

// Minimal column aligner for the human-readable views.
struct TextTable {
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }

    void print(std::ostream& out, int indent = 0) const {
        std::vector<std::size_t> width;
        for (const std::vector<std::string>& row : rows) {
            if (width.size() < row.size()) width.resize(row.size(), 0);
            for (std::size_t i = 0; i < row.size(); ++i)
                width[i] = std::max(width[i], row[i].size());
        }
        for (const std::vector<std::string>& row : rows) {
            for (int k = 0; k < indent; ++k) out << ' ';
            for (std::size_t i = 0; i < row.size(); ++i) {
                out << row[i];
                if (i + 1 < row.size())
                    out << std::string(width[i] - row[i].size() + 2, ' ');
            }
            out << '\n';
        }
    }
};

std::string assumptions_label(const AssumptionSet& a) {
    std::vector<std::string> parts;
    if (a.monotonicity) parts.push_back("monotonicity");
    if (a.stochastic_dominance) parts.push_back("stochastic dominance");
    if (a.exclusion) parts.push_back("exclusion");
    if (parts.empty()) return "none";
    std::string out = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) out += " + " + parts[i];
    return out;
}

// ---- JSON builders ------------------------------------------------------

ordered_json pop_json(const PopulationSpec& pop) {
    return ordered_json::parse(io::to_popspec_json(pop));
}

// The shared builders omit the schema key so report can embed their output;
// standalone commands wrap it in first here.
ordered_json with_schema(const char* schema, ordered_json body) {
    ordered_json j{{"schema", schema}};
    for (auto& item : body.items()) j[item.key()] = std::move(item.value());
    return j;
}

ordered_json summary_json(const ObservedSummary& summary) {
    ordered_json cells = ordered_json::array();
    for (Arm arm : kBothArms) {
        for (Survival s : {Survival::alive, Survival::dead}) {
            const ObservedSummary::Cell& cell = summary.cell(arm, s);
            ordered_json jc{{"arm", to_string(arm)},
                            {"survival", to_string(s)},
                            {"share", cell.share}};
            if (cell.y) {
                ordered_json comps = ordered_json::array();
                for (const SurvivorLaw::Component& c : cell.y->components)
                    comps.push_back(ordered_json{{"weight", c.weight},
                                                 {"mean", c.law.mean},
                                                 {"sd", c.law.sd}});
                jc["survivors"] = ordered_json{{"mean", cell.y->mean()},
                                               {"components", std::move(comps)}};
            } else {
                jc["survivors"] = nullptr;
            }
            cells.push_back(std::move(jc));
        }
    }
    return ordered_json{{"cells", std::move(cells)}};
}

ordered_json bounds_json(const BoundsResult& res) {
    ordered_json j{{"assumptions",
                    ordered_json{{"monotonicity", res.assumptions.monotonicity},
                                 {"stochastic_dominance",
                                  res.assumptions.stochastic_dominance},
                                 {"exclusion", res.assumptions.exclusion}}},
                   {"feasible", res.feasible}};
    if (res.feasible) {
        j["lower"] = res.lower;
        j["upper"] = res.upper;
        j["pi_ll_range"] = ordered_json{{"lo", res.pi_ll_range.lo},
                                        {"hi", res.pi_ll_range.hi},
                                        {"open_lo", res.pi_ll_range.open_lo}};
        j["attained_at"] = ordered_json{{"lower", res.attained_at_lower},
                                        {"upper", res.attained_at_upper}};
        j["infeasible_reason"] = nullptr;
    } else {
        j["lower"] = nullptr;
        j["upper"] = nullptr;
        j["pi_ll_range"] = ordered_json{{"lo", res.pi_ll_range.lo},
                                        {"hi", res.pi_ll_range.hi},
                                        {"open_lo", res.pi_ll_range.open_lo}};
        j["attained_at"] = nullptr;
        j["infeasible_reason"] = res.infeasible_reason;
    }
    return j;
}

ordered_json fit_json(const MixtureFit& fit) {
    ordered_json comps = ordered_json::array();
    for (const NormalComponent& c : fit.components)
        comps.push_back(ordered_json{{"weight", c.weight},
                                     {"mean", c.mean},
                                     {"sd", c.sd}});
    return ordered_json{{"components", std::move(comps)},
                        {"loglik", fit.loglik},
                        {"iterations", fit.iterations},
                        {"converged", fit.converged},
                        {"restarts_used", fit.restarts_used},
                        {"loglik_trace", fit.loglik_trace}};
}

ordered_json ident_json(const StrataIdentification& ident) {
    ordered_json sols = ordered_json::array();
    for (const StrataSolution& sol : ident.solutions) {
        ordered_json pi;
        for (std::size_t i = 0; i < 4; ++i)
            pi[to_string(kAllStrata[i])] = sol.pi[i];
        sols.push_back(ordered_json{{"pi", std::move(pi)},
                                    {"t_ll_component", sol.t_ll_component},
                                    {"c_ll_component", sol.c_ll_component},
                                    {"pi_t_candidate", sol.pi_t_candidate},
                                    {"pi_c_candidate", sol.pi_c_candidate}});
    }
    return ordered_json{{"ambiguous", ident.ambiguous},
                        {"solutions", std::move(sols)}};
}

// ---- shared table pieces ------------------------------------------------

void print_truth_table(std::ostream& out, const PopulationSpec& pop) {
    TextTable t;
    t.add({"stratum", "proportion", "qol_t", "qol_c", "x"});
    for (const StratumSpec& spec : pop.strata)
        t.add({to_string(spec.stratum), num(spec.proportion), law_str(spec.qol_t),
               law_str(spec.qol_c), law_str(spec.x)});
    t.print(out);
    out << "survival rate under T: " << num(true_survival_rate(pop, Arm::T))
        << "\n";
    out << "survival rate under C: " << num(true_survival_rate(pop, Arm::C))
        << "\n";
    const std::optional<double> sace = true_sace(pop);
    if (sace)
        out << "SACE (always survivors): " << num(*sace) << "\n";
    else
        out << "SACE (always survivors): undefined (no always survivors)\n";
}

std::string survivors_str(const SurvivorLaw& law) {
    if (law.components.size() > 8) {
        std::ostringstream s;
        s << law.components.size() << " point masses";
        return s.str();
    }
    std::string s;
    for (std::size_t i = 0; i < law.components.size(); ++i) {
        const SurvivorLaw::Component& c = law.components[i];
        if (i) s += "; ";
        s += (c.law.sd == 0.0 ? num(c.law.mean)
                              : "N(" + num(c.law.mean) + ", " + num(c.law.sd) + ")") +
             " @ " + num(c.weight);
    }
    return s;
}

void print_summary_table(std::ostream& out, const ObservedSummary& summary) {
    TextTable t;
    t.add({"cell", "share", "mean_y", "survivors"});
    for (Arm arm : kBothArms) {
        for (Survival s : {Survival::alive, Survival::dead}) {
            const ObservedSummary::Cell& cell = summary.cell(arm, s);
            std::string name = std::string(to_string(arm)) + "," +
                               (s == Survival::alive ? "alive" : "dead");
            if (cell.y)
                t.add({name, num(cell.share), num(cell.y->mean()),
                       survivors_str(*cell.y)});
            else
                t.add({name, num(cell.share), "*", ""});
        }
    }
    t.print(out);
}

void print_bounds_table(std::ostream& out, const BoundsResult& res) {
    out << "assumptions: " << assumptions_label(res.assumptions) << "\n";
    if (!res.feasible) {
        out << "infeasible: " << res.infeasible_reason << "\n";
        return;
    }
    const PiRange& r = res.pi_ll_range;
    out << "always-survivor share range: " << (r.open_lo ? '(' : '[')
        << num(r.lo) << ", " << num(r.hi) << "]\n";
    out << "[" << num(res.lower) << ", " << num(res.upper) << "]\n";
    out << "lower end: " << res.attained_at_lower << "\n";
    out << "upper end: " << res.attained_at_upper << "\n";
}

// ---- input plumbing -----------------------------------------------------

PopulationSpec load_valid_pop(const std::string& path) {
    PopulationSpec pop = io::load_popspec(path);
    require_valid(pop);
    return pop;
}

ObservedSummary summary_from_config(const RunConfig& config) {
    if (config.pop_path && config.records_path)
        throw ValidationError("pass exactly one of --pop or --records");
    if (config.pop_path)
        return expected_observed_summary(load_valid_pop(*config.pop_path));
    if (config.records_path)
        return empirical_summary(io::load_records(*config.records_path));
    throw ValidationError("pass --pop or --records");
}

// ---- commands -----------------------------------------------------------

int cmd_truth(const RunConfig& config, std::ostream& out) {
    if (!config.pop_path) throw ValidationError("truth needs --pop");
    const PopulationSpec pop = load_valid_pop(*config.pop_path);
    if (config.format == OutputFormat::json) {
        const std::optional<double> sace = true_sace(pop);
        ordered_json j{{"schema", "truth/1"},
                       {"population", pop_json(pop)},
                       {"survival_rate_t", true_survival_rate(pop, Arm::T)},
                       {"survival_rate_c", true_survival_rate(pop, Arm::C)},
                       {"sace", sace ? ordered_json(*sace) : ordered_json(nullptr)}};
        out << j.dump(2) << "\n";
    } else {
        out << "population truth\n";
        print_truth_table(out, pop);
    }
    return 0;
}

int cmd_simulate(const RunConfig& config, std::ostream& out) {
    if (!config.pop_path) throw ValidationError("simulate needs --pop");
    const PopulationSpec pop = load_valid_pop(*config.pop_path);
    const std::vector<UnitRecord> records =
        assign_and_observe(pop, config.n, config.seed);
    io::write_records_csv(out, records);
    return 0;
}

int cmd_observe(const RunConfig& config, std::ostream& out) {
    const ObservedSummary summary = summary_from_config(config);
    if (config.format == OutputFormat::json) {
        out << with_schema("observed/1", summary_json(summary)).dump(2) << "\n";
    } else {
        out << "observed data summary\n";
        print_summary_table(out, summary);
    }
    return 0;
}

int cmd_naive(const RunConfig& config, std::ostream& out) {
    const ObservedSummary summary = summary_from_config(config);
    const double value = naive_survivor_contrast(summary);
    const char* note =
        "not a causal effect: treated survivors mix always-survivors with LD "
        "units while control survivors mix always-survivors with DL units, "
        "so the two cells describe different kinds of people";
    if (config.format == OutputFormat::json) {
        ordered_json j{{"schema", "naive/1"},
                       {"value", value},
                       {"causal", false},
                       {"note", note}};
        out << j.dump(2) << "\n";
    } else {
        out << "naive survivor contrast: " << num(value) << "\n";
        out << note << "\n";
    }
    return 0;
}

int cmd_ive(const RunConfig& config, std::ostream& out) {
    const ObservedSummary summary = summary_from_config(config);
    const double value = ive_zero_imputation(summary);
    const char* note =
        "imputes quality of life 0 for the dead (a scale choice, not a fact) "
        "and leans on an exclusion restriction that cannot hold here, since "
        "assignment moves the outcome through survival itself";
    if (config.format == OutputFormat::json) {
        ordered_json j{{"schema", "ive/1"},
                       {"value", value},
                       {"causal", false},
                       {"note", note}};
        out << j.dump(2) << "\n";
    } else {
        out << "zero-imputed instrumental-variable estimate: " << num(value)
            << "\n";
        out << note << "\n";
    }
    return 0;
}

int cmd_bounds(const RunConfig& config, std::ostream& out) {
    const ObservedSummary summary = summary_from_config(config);
    const ArmObservation obs_t = arm_observation(summary, Arm::T);
    const ArmObservation obs_c = arm_observation(summary, Arm::C);
    BoundOptions options;
    options.grid_points = config.grid_points;
    options.dominance_form = config.dominance_form;
    const BoundsResult res =
        sace_bounds(obs_t, obs_c, config.assumptions, options);
    if (config.format == OutputFormat::json) {
        out << with_schema("bounds/1", bounds_json(res)).dump(2) << "\n";
    } else {
        out << "bounds on the survivor-causal effect\n";
        print_bounds_table(out, res);
    }
    return res.feasible ? 0 : 3;
}

struct EmAnalysis {
    double p_t = 0.0, p_c = 0.0;
    std::int64_t survivors_t = 0, survivors_c = 0;
    MixtureFit fit_t, fit_c;
    StrataIdentification ident;
    std::vector<double> candidates;
};

EmAnalysis run_em_analysis(const std::vector<UnitRecord>& records,
                           const RunConfig& config) {
    std::array<std::vector<double>, 2> samples;
    std::array<std::int64_t, 2> assigned{};
    require_consistent(records);
    for (const UnitRecord& rec : records) {
        const std::size_t i = static_cast<std::size_t>(rec.z == Arm::C);
        assigned[i]++;
        if (rec.y_obs) samples[i].push_back(*rec.y_obs);
    }
    if (assigned[0] == 0 || assigned[1] == 0)
        throw ValidationError("both arms must appear in the records");

    EmAnalysis a;
    a.survivors_t = static_cast<std::int64_t>(samples[0].size());
    a.survivors_c = static_cast<std::int64_t>(samples[1].size());
    a.p_t = static_cast<double>(samples[0].size()) / static_cast<double>(assigned[0]);
    a.p_c = static_cast<double>(samples[1].size()) / static_cast<double>(assigned[1]);

    EmOptions options;
    options.restarts = config.em_restarts;
    options.max_iterations = config.em_max_iterations;
    options.tolerance = config.em_tolerance;
    options.seed = config.seed;
    a.fit_t = em_fit(samples[0], config.em_k, options);
    a.fit_c = em_fit(samples[1], config.em_k, options);
    a.ident = identify_strata(a.fit_t, a.fit_c, a.p_t, a.p_c, config.match_tol);
    a.candidates = sace_candidates(a.ident, a.fit_t, a.fit_c);
    return a;
}

void print_fit_table(std::ostream& out, const char* arm_name,
                     const MixtureFit& fit, std::int64_t n_samples, double p) {
    out << "mixture fit, " << arm_name << " survivors (n = " << n_samples
        << ", survival rate " << num(p) << ")\n";
    TextTable t;
    t.add({"component", "weight", "mean", "sd"});
    for (std::size_t i = 0; i < fit.components.size(); ++i)
        t.add({std::to_string(i), num(fit.components[i].weight),
               num(fit.components[i].mean), num(fit.components[i].sd)});
    t.print(out, 2);
    out << "  loglik " << num(fit.loglik) << ", " << fit.iterations
        << " iterations, " << (fit.converged ? "converged" : "NOT converged")
        << "\n";
}

void print_em_tables(std::ostream& out, const EmAnalysis& a, double match_tol) {
    print_fit_table(out, "treated", a.fit_t, a.survivors_t, a.p_t);
    print_fit_table(out, "control", a.fit_c, a.survivors_c, a.p_c);
    out << "stratum identification (matching tolerance " << num(match_tol)
        << ")\n";
    TextTable t;
    t.add({"solution", "LL", "LD", "DL", "DD", "T comp", "C comp"});
    for (std::size_t i = 0; i < a.ident.solutions.size(); ++i) {
        const StrataSolution& sol = a.ident.solutions[i];
        t.add({std::to_string(i), num(sol.pi[0]), num(sol.pi[1]), num(sol.pi[2]),
               num(sol.pi[3]), std::to_string(sol.t_ll_component),
               std::to_string(sol.c_ll_component)});
    }
    t.print(out, 2);
    out << "ambiguous: " << (a.ident.ambiguous ? "yes" : "no") << " ("
        << a.ident.solutions.size() << " solution"
        << (a.ident.solutions.size() == 1 ? "" : "s") << ")\n";
    out << "sace candidates:";
    for (double c : a.candidates) out << " " << num(c);
    out << "\n";
}

ordered_json em_json(const EmAnalysis& a) {
    ordered_json candidates = ordered_json::array();
    for (double c : a.candidates) candidates.push_back(c);
    return ordered_json{{"p_t", a.p_t},
                        {"p_c", a.p_c},
                        {"fit_t", fit_json(a.fit_t)},
                        {"fit_c", fit_json(a.fit_c)},
                        {"identification", ident_json(a.ident)},
                        {"sace_candidates", std::move(candidates)}};
}

int cmd_em(const RunConfig& config, std::ostream& out) {
    if (!config.records_path)
        throw ValidationError("em needs --records (survivor samples)");
    const std::vector<UnitRecord> records =
        io::load_records(*config.records_path);
    const EmAnalysis a = run_em_analysis(records, config);
    if (config.format == OutputFormat::json) {
        out << with_schema("em/1", em_json(a)).dump(2) << "\n";
    } else {
        print_em_tables(out, a, config.match_tol);
    }
    return 0;
}

ordered_json group_json(const CovariateGroup& g) {
    ordered_json j{{"x_center", g.x_center},
                   {"n", g.n},
                   {"n_t", g.n_t},
                   {"n_c", g.n_c},
                   {"survival_rate_t", g.survival_rate_t},
                   {"survival_rate_c", g.survival_rate_c},
                   {"mean_y_t", g.mean_y_t ? ordered_json(*g.mean_y_t)
                                           : ordered_json(nullptr)},
                   {"mean_y_c", g.mean_y_c ? ordered_json(*g.mean_y_c)
                                           : ordered_json(nullptr)},
                   {"read_as", g.inferred_stratum
                                   ? ordered_json(to_string(*g.inferred_stratum))
                                   : ordered_json(nullptr)},
                   {"separation_warning", g.separation_warning}};
    return j;
}

int cmd_covariate_recover(const RunConfig& config, std::ostream& out) {
    if (!config.records_path)
        throw ValidationError("covariate-recover needs --records");
    const std::vector<UnitRecord> records =
        io::load_records(*config.records_path);
    const BinningRule binning = config.bin_width
                                    ? BinningRule::equal_width(*config.bin_width)
                                    : BinningRule::exact();
    const std::vector<CovariateGroup> groups =
        group_by_covariate(records, binning);
    const RecoveredPopulation recovered =
        recover_principal_table(groups, config.threshold);
    const std::optional<double> sace = true_sace(recovered.population);

    if (config.format == OutputFormat::json) {
        ordered_json jgroups = ordered_json::array();
        for (const CovariateGroup& g : recovered.groups)
            jgroups.push_back(group_json(g));
        ordered_json j{{"schema", "covariate-recover/1"},
                       {"groups", std::move(jgroups)},
                       {"population", pop_json(recovered.population)},
                       {"low_confidence", recovered.low_confidence},
                       {"implied_sace",
                        sace ? ordered_json(*sace) : ordered_json(nullptr)}};
        out << j.dump(2) << "\n";
    } else {
        out << "covariate groups";
        if (config.bin_width) out << " (bin width " << num(*config.bin_width) << ")";
        out << "\n";
        TextTable t;
        t.add({"x_center", "n", "surv_T", "surv_C", "mean_y_T", "mean_y_C",
               "read_as", "flag"});
        for (const CovariateGroup& g : recovered.groups)
            t.add({num(g.x_center), std::to_string(g.n), num(g.survival_rate_t),
                   num(g.survival_rate_c),
                   g.mean_y_t ? num(*g.mean_y_t) : std::string("*"),
                   g.mean_y_c ? num(*g.mean_y_c) : std::string("*"),
                   g.inferred_stratum ? to_string(*g.inferred_stratum) : "?",
                   g.separation_warning ? "warn" : ""});
        t.print(out);
        out << "recovered population\n";
        print_truth_table(out, recovered.population);
        out << "confidence: "
            << (recovered.low_confidence
                    ? "LOW (survival rates near 1/2 blur the stratum reading)"
                    : "ok")
            << "\n";
    }
    return 0;
}

// The four standard assumption rows, in the order the comparisons use.
std::vector<AssumptionSet> standard_assumption_rows() {
    return {AssumptionSet{},
            AssumptionSet{.monotonicity = true},
            AssumptionSet{.stochastic_dominance = true},
            AssumptionSet{.monotonicity = true, .stochastic_dominance = true}};
}

void print_bounds_rows(std::ostream& out, const ObservedSummary& summary,
                       int grid_points) {
    const ArmObservation obs_t = arm_observation(summary, Arm::T);
    const ArmObservation obs_c = arm_observation(summary, Arm::C);
    BoundOptions options;
    options.grid_points = grid_points;
    TextTable t;
    t.add({"assumptions", "lower", "upper"});
    for (const AssumptionSet& a : standard_assumption_rows()) {
        const BoundsResult res = sace_bounds(obs_t, obs_c, a, options);
        if (res.feasible)
            t.add({assumptions_label(a), num(res.lower), num(res.upper)});
        else
            t.add({assumptions_label(a), "infeasible", ""});
    }
    t.print(out, 2);
}

ordered_json bounds_rows_json(const ObservedSummary& summary, int grid_points) {
    const ArmObservation obs_t = arm_observation(summary, Arm::T);
    const ArmObservation obs_c = arm_observation(summary, Arm::C);
    BoundOptions options;
    options.grid_points = grid_points;
    ordered_json rows = ordered_json::array();
    for (const AssumptionSet& a : standard_assumption_rows())
        rows.push_back(bounds_json(sace_bounds(obs_t, obs_c, a, options)));
    return rows;
}

bool summary_is_discrete(const ObservedSummary& summary) {
    for (Arm arm : kBothArms) {
        const ObservedSummary::Cell& cell = summary.cell(arm, Survival::alive);
        if (cell.y && !cell.y->is_discrete()) return false;
    }
    return true;
}

bool population_has_spread(const PopulationSpec& pop) {
    for (const StratumSpec& spec : pop.strata) {
        if (spec.qol_t && spec.qol_t->sd > 0.0) return true;
        if (spec.qol_c && spec.qol_c->sd > 0.0) return true;
    }
    return false;
}

int cmd_report(const RunConfig& config, std::ostream& out) {
    if (!config.pop_path) throw ValidationError("report needs --pop");
    const PopulationSpec pop = load_valid_pop(*config.pop_path);
    const ObservedSummary expected = expected_observed_summary(pop);
    const std::optional<double> sace = true_sace(pop);
    const bool expected_discrete = summary_is_discrete(expected);

    std::vector<UnitRecord> records;
    std::optional<ObservedSummary> empirical;
    if (config.n > 0) {
        records = assign_and_observe(pop, config.n, config.seed);
        empirical = empirical_summary(records);
    }
    const bool want_em = population_has_spread(pop);

    if (config.format == OutputFormat::json) {
        ordered_json j{{"schema", "report/1"}};
        j["population"] = pop_json(pop);
        j["truth"] = ordered_json{
            {"survival_rate_t", true_survival_rate(pop, Arm::T)},
            {"survival_rate_c", true_survival_rate(pop, Arm::C)},
            {"sace", sace ? ordered_json(*sace) : ordered_json(nullptr)}};
        ordered_json exp = summary_json(expected);
        exp["naive"] = naive_survivor_contrast(expected);
        exp["ive"] = ive_zero_imputation(expected);
        if (expected_discrete)
            exp["bounds"] = bounds_rows_json(expected, config.grid_points);
        else
            exp["bounds"] = nullptr;
        j["expected"] = std::move(exp);
        if (empirical) {
            ordered_json emp = summary_json(*empirical);
            emp["n"] = config.n;
            emp["seed"] = config.seed;
            emp["naive"] = naive_survivor_contrast(*empirical);
            emp["ive"] = ive_zero_imputation(*empirical);
            emp["bounds"] = bounds_rows_json(*empirical, config.grid_points);
            j["simulated"] = std::move(emp);
        } else {
            j["simulated"] = nullptr;
        }
        if (want_em && !records.empty()) {
            const EmAnalysis a = run_em_analysis(records, config);
            j["mixture_identification"] = em_json(a);
        } else {
            j["mixture_identification"] = nullptr;
        }
        out << j.dump(2) << "\n";
        return 0;
    }

    out << "== population truth ==\n";
    print_truth_table(out, pop);

    out << "\n== expected observed data ==\n";
    print_summary_table(out, expected);

    out << "\n== estimators on the expected data ==\n";
    out << "naive survivor contrast: " << num(naive_survivor_contrast(expected))
        << "\n";
    out << "zero-imputed IVE: " << num(ive_zero_imputation(expected)) << "\n";
    if (expected_discrete) {
        out << "bounds:\n";
        print_bounds_rows(out, expected, config.grid_points);
    } else {
        out << "bounds: need a finite outcome support; see the simulated "
               "section\n";
    }
    if (sace)
        out << "true SACE for comparison: " << num(*sace) << "\n";
    else
        out << "true SACE for comparison: undefined\n";

    if (empirical) {
        out << "\n== simulated trial (n = " << config.n
            << ", seed = " << config.seed << ") ==\n";
        print_summary_table(out, *empirical);
        out << "naive survivor contrast: "
            << num(naive_survivor_contrast(*empirical)) << "\n";
        out << "zero-imputed IVE: " << num(ive_zero_imputation(*empirical))
            << "\n";
        out << "bounds:\n";
        print_bounds_rows(out, *empirical, config.grid_points);
    }

    if (want_em) {
        out << "\n== mixture identification on simulated survivors ==\n";
        if (records.empty()) {
            out << "skipped: pass --n to simulate survivor samples\n";
        } else {
            const EmAnalysis a = run_em_analysis(records, config);
            print_em_tables(out, a, config.match_tol);
            if (sace)
                out << "true SACE for comparison: " << num(*sace) << "\n";
        }
    }
    return 0;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        if (config.command == "truth") return cmd_truth(config, out);
        if (config.command == "simulate") return cmd_simulate(config, out);
        if (config.command == "observe") return cmd_observe(config, out);
        if (config.command == "naive") return cmd_naive(config, out);
        if (config.command == "ive") return cmd_ive(config, out);
        if (config.command == "bounds") return cmd_bounds(config, out);
        if (config.command == "em") return cmd_em(config, out);
        if (config.command == "covariate-recover")
            return cmd_covariate_recover(config, out);
        if (config.command == "report") return cmd_report(config, out);
        throw ValidationError("unknown command: " + config.command);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const EstimationError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int main_with_args(int argc, const char* const* argv, std::ostream& out,
                   std::ostream& err) {
    RunConfig cfg;

    if (const char* env = std::getenv("SACEKIT_GRID_POINTS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 2) {
            err << "error: SACEKIT_GRID_POINTS must be an integer >= 2, got \""
                << env << "\"\n";
            return 1;
        }
        cfg.grid_points = static_cast<int>(v);
    }

    CLI::App app{"survivor-causal-effect toolkit"};
    app.require_subcommand(1);

    std::string pop_path, records_path;
    std::string format = "table";
    std::string dominance = "mean";
    std::vector<std::string> assume;
    double bin_width = 0.0;
    bool have_bin_width = false;

    const auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", format, "Output format")
            ->check(CLI::IsMember({"table", "json"}));
    };
    const auto add_pop = [&](CLI::App* sub) {
        sub->add_option("--pop", pop_path, "Population JSON (popspec/1)");
    };
    const auto add_records = [&](CLI::App* sub) {
        sub->add_option("--records", records_path, "Trial records CSV");
    };

    CLI::App* truth = app.add_subcommand("truth", "Ground-truth stratum table");
    add_pop(truth);
    add_format(truth);

    CLI::App* simulate =
        app.add_subcommand("simulate", "Simulate a randomized trial to CSV");
    add_pop(simulate);
    simulate->add_option("--n", cfg.n, "Sample size (even)");
    simulate->add_option("--seed", cfg.seed, "RNG seed");

    CLI::App* observe =
        app.add_subcommand("observe", "Observed-data summary table");
    add_pop(observe);
    add_records(observe);
    add_format(observe);

    CLI::App* naive = app.add_subcommand(
        "naive", "Survivor mean contrast (not a causal effect)");
    add_pop(naive);
    add_records(naive);
    add_format(naive);

    CLI::App* ive = app.add_subcommand(
        "ive", "Zero-imputed instrumental-variable foil");
    add_pop(ive);
    add_records(ive);
    add_format(ive);

    CLI::App* bounds = app.add_subcommand(
        "bounds", "Partial-identification bounds on the survivor effect");
    add_pop(bounds);
    add_records(bounds);
    add_format(bounds);
    bounds->add_option("--assume", assume,
                       "Assumptions: monotonicity, stochastic-dominance, "
                       "exclusion")
        ->delimiter(',')
        ->check(CLI::IsMember(
            {"monotonicity", "stochastic-dominance", "exclusion"}));
    bounds->add_option("--grid-points", cfg.grid_points,
                       "Share-sweep resolution (env SACEKIT_GRID_POINTS "
                       "overrides the default)");
    bounds->add_option("--dominance-form", dominance,
                       "How dominance is imposed")
        ->check(CLI::IsMember({"mean", "first-order"}));

    CLI::App* em = app.add_subcommand(
        "em", "Mixture fit and stratum identification from records");
    add_records(em);
    add_format(em);
    em->add_option("--k", cfg.em_k, "Components per survivor cell");
    em->add_option("--restarts", cfg.em_restarts, "EM restarts");
    em->add_option("--max-iter", cfg.em_max_iterations, "EM iteration cap");
    em->add_option("--tol", cfg.em_tolerance, "EM convergence tolerance");
    em->add_option("--match-tol", cfg.match_tol,
                   "Cross-arm weight matching tolerance");
    em->add_option("--seed", cfg.seed, "Seed for EM restarts");

    CLI::App* recover = app.add_subcommand(
        "covariate-recover", "Read strata off a separating covariate");
    add_records(recover);
    add_format(recover);
    recover->add_option("--bin-width", bin_width, "Covariate bin width")
        ->each([&](const std::string&) { have_bin_width = true; });
    recover->add_option("--threshold", cfg.threshold,
                        "Survival rate counted as alive");

    CLI::App* report = app.add_subcommand(
        "report", "Side-by-side truth vs estimators");
    add_pop(report);
    report->add_option("--n", cfg.n, "Simulated sample size (0 = skip)");
    report->add_option("--seed", cfg.seed, "RNG seed");
    report->add_option("--grid-points", cfg.grid_points,
                       "Share-sweep resolution");
    report->add_option("--match-tol", cfg.match_tol,
                       "Cross-arm weight matching tolerance");
    add_format(report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    cfg.command = app.get_subcommands().front()->get_name();
    if (!pop_path.empty()) cfg.pop_path = pop_path;
    if (!records_path.empty()) cfg.records_path = records_path;
    cfg.format = format == "json" ? OutputFormat::json : OutputFormat::table;
    cfg.dominance_form = dominance == "first-order" ? DominanceForm::first_order
                                                    : DominanceForm::mean;
    if (have_bin_width) cfg.bin_width = bin_width;
    for (const std::string& a : assume) {
        if (a == "monotonicity") cfg.assumptions.monotonicity = true;
        if (a == "stochastic-dominance") cfg.assumptions.stochastic_dominance = true;
        if (a == "exclusion") cfg.assumptions.exclusion = true;
    }
    return run(cfg, out, err);
}

}  // namespace sacekit::cli
