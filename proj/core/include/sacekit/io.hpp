#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sacekit/strata.hpp"
#include "sacekit/trial.hpp"

namespace sacekit::io {

// Population files use the "popspec/1" JSON schema: a top-level
// {"schema": "popspec/1", "strata": [...]} with one entry per stratum
// carrying "proportion" and optional "qol_t"/"qol_c"/"x" laws, each
// {"mean": m, "sd": s} with sd defaulting to 0. A dead cell simply omits
// its law. Structural problems raise ParseError; parsing does not validate
// the population's semantic invariants (call validate for that).
PopulationSpec parse_popspec(const std::string& text);
PopulationSpec load_popspec(const std::string& path);
std::string to_popspec_json(const PopulationSpec& pop, int indent = 2);

// Trial records travel as CSV with the exact header "id,x,z,s,y":
// z in {T,C}, s in {L,D}, x and y empty when absent. y must be present
// exactly on survivors; a dead unit with an outcome is rejected, because
// quality of life after death is undefined rather than zero. The latent
// stratum never appears: observable data cannot contain it.
std::vector<UnitRecord> parse_records_csv(std::istream& in);
std::vector<UnitRecord> load_records(const std::string& path);
void write_records_csv(std::ostream& out, const std::vector<UnitRecord>& records);

// Shortest decimal form that parses back to exactly the same double; used
// everywhere machine-readable output is emitted so reruns are byte-stable.
std::string format_double(double v);

}  // namespace sacekit::io
