#include "sacekit/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "json.hpp"
#include "sacekit/errors.hpp"

namespace sacekit::io {

using ordered_json = nlohmann::ordered_json;

namespace {

double get_number(const ordered_json& obj, const char* key,
                  const std::string& where) {
    if (!obj.contains(key))
        throw ParseError(where + " is missing \"" + key + "\"");
    const ordered_json& v = obj.at(key);
    if (!v.is_number())
        throw ParseError(where + " field \"" + key + "\" must be a number");
    return v.get<double>();
}

NormalLaw parse_law(const ordered_json& obj, const std::string& where) {
    if (!obj.is_object()) throw ParseError(where + " must be an object");
    NormalLaw law;
    law.mean = get_number(obj, "mean", where);
    if (obj.contains("sd")) {
        if (!obj.at("sd").is_number())
            throw ParseError(where + " field \"sd\" must be a number");
        law.sd = obj.at("sd").get<double>();
    }
    return law;
}

ordered_json law_json(const NormalLaw& law) {
    return ordered_json{{"mean", law.mean}, {"sd", law.sd}};
}

}  // namespace

PopulationSpec parse_popspec(const std::string& text) {
    ordered_json root;
    try {
        root = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("population JSON: ") + e.what());
    }
    if (!root.is_object() || root.value("schema", "") != "popspec/1")
        throw ParseError("population JSON must declare \"schema\": \"popspec/1\"");
    if (!root.contains("strata") || !root.at("strata").is_array())
        throw ParseError("population JSON needs a \"strata\" array");

    PopulationSpec pop;
    std::array<bool, 4> seen{};
    for (const ordered_json& entry : root.at("strata")) {
        if (!entry.is_object() || !entry.contains("stratum") ||
            !entry.at("stratum").is_string())
            throw ParseError("each strata entry needs a \"stratum\" label");
        const std::string label = entry.at("stratum").get<std::string>();
        const std::optional<PrincipalStratum> st = stratum_from_string(label);
        if (!st) throw ParseError("unknown stratum label \"" + label + "\"");
        if (seen[static_cast<std::size_t>(*st)])
            throw ParseError("stratum \"" + label + "\" appears twice");
        seen[static_cast<std::size_t>(*st)] = true;

        StratumSpec& spec = pop.spec(*st);
        spec.stratum = *st;
        spec.proportion = get_number(entry, "proportion", "stratum " + label);
        if (entry.contains("qol_t"))
            spec.qol_t = parse_law(entry.at("qol_t"), label + ".qol_t");
        if (entry.contains("qol_c"))
            spec.qol_c = parse_law(entry.at("qol_c"), label + ".qol_c");
        if (entry.contains("x")) spec.x = parse_law(entry.at("x"), label + ".x");
    }
    for (std::size_t i = 0; i < 4; ++i)
        if (!seen[i])
            throw ParseError(std::string("stratum \"") + to_string(kAllStrata[i]) +
                             "\" is missing");
    return pop;
}

PopulationSpec load_popspec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read population file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_popspec(buf.str());
}

std::string to_popspec_json(const PopulationSpec& pop, int indent) {
    ordered_json strata = ordered_json::array();
    for (const StratumSpec& spec : pop.strata) {
        ordered_json entry{{"stratum", to_string(spec.stratum)},
                           {"proportion", spec.proportion}};
        if (spec.qol_t) entry["qol_t"] = law_json(*spec.qol_t);
        if (spec.qol_c) entry["qol_c"] = law_json(*spec.qol_c);
        if (spec.x) entry["x"] = law_json(*spec.x);
        strata.push_back(std::move(entry));
    }
    ordered_json root{{"schema", "popspec/1"}, {"strata", std::move(strata)}};
    return root.dump(indent);
}

std::string format_double(double v) {
    char buf[64];
    const std::to_chars_result res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double_field(const std::string& field, std::size_t line,
                          const char* what) {
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const std::from_chars_result res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << "line " << line << ": \"" << field << "\" is not a finite "
            << what;
        throw ParseError(msg.str());
    }
    return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

}  // namespace

std::vector<UnitRecord> parse_records_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("record CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "id,x,z,s,y")
        throw ParseError("record CSV must start with the header \"id,x,z,s,y\"");

    std::vector<UnitRecord> records;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 5) {
            std::ostringstream msg;
            msg << "line " << lineno << ": expected 5 fields, got " << f.size();
            throw ParseError(msg.str());
        }

        UnitRecord rec;
        {
            const char* first = f[0].data();
            const char* last = f[0].data() + f[0].size();
            const std::from_chars_result res = std::from_chars(first, last, rec.id);
            if (res.ec != std::errc{} || res.ptr != last) {
                std::ostringstream msg;
                msg << "line " << lineno << ": \"" << f[0] << "\" is not an id";
                throw ParseError(msg.str());
            }
        }
        if (!f[1].empty()) rec.x = parse_double_field(f[1], lineno, "covariate");
        const std::optional<Arm> arm = arm_from_string(f[2]);
        if (!arm) {
            std::ostringstream msg;
            msg << "line " << lineno << ": assignment must be T or C, got \""
                << f[2] << "\"";
            throw ParseError(msg.str());
        }
        rec.z = *arm;
        if (f[3] == "L") rec.s_obs = Survival::alive;
        else if (f[3] == "D") rec.s_obs = Survival::dead;
        else {
            std::ostringstream msg;
            msg << "line " << lineno << ": survival must be L or D, got \""
                << f[3] << "\"";
            throw ParseError(msg.str());
        }
        if (!f[4].empty()) rec.y_obs = parse_double_field(f[4], lineno, "outcome");

        if ((rec.s_obs == Survival::alive) != rec.y_obs.has_value()) {
            std::ostringstream msg;
            msg << "line " << lineno
                << (rec.y_obs ? ": dead unit carries an outcome; quality of "
                                "life after death is undefined, not zero"
                              : ": survivor is missing its outcome");
            throw ValidationError(msg.str());
        }
        records.push_back(rec);
    }
    return records;
}

std::vector<UnitRecord> load_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read record file: " + path);
    return parse_records_csv(in);
}

void write_records_csv(std::ostream& out,
                       const std::vector<UnitRecord>& records) {
    out << "id,x,z,s,y\n";
    for (const UnitRecord& rec : records) {
        out << rec.id << ',';
        if (rec.x) out << format_double(*rec.x);
        out << ',' << to_string(rec.z) << ',' << to_string(rec.s_obs) << ',';
        if (rec.y_obs) out << format_double(*rec.y_obs);
        out << '\n';
    }
}

}  // namespace sacekit::io
