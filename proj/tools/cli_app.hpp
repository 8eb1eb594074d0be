#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "sacekit/estimators.hpp"

namespace sacekit::cli {

enum class OutputFormat { table, json };

inline constexpr int kDefaultGridPoints = 1001;

// Everything a single invocation needs, already decoded. Kept separate from
// the argv front end so tests can drive commands in-process and assert on
// the exact bytes they produce.
struct RunConfig {
    std::string command;
    std::optional<std::string> pop_path;
    std::optional<std::string> records_path;
    OutputFormat format = OutputFormat::table;
    std::uint64_t seed = 0;
    std::int64_t n = 0;
    AssumptionSet assumptions;
    int grid_points = kDefaultGridPoints;
    DominanceForm dominance_form = DominanceForm::mean;
    int em_k = 2;
    int em_restarts = 10;
    int em_max_iterations = 2000;
    double em_tolerance = 1e-8;
    double match_tol = 0.05;
    std::optional<double> bin_width;
    double threshold = 0.5;
};

// Runs one command, writing results to `out` and diagnostics to `err`.
// Returns the exit code: 0 success, 1 invalid input, 2 unreadable or
// undecodable input, 3 estimation impossible on these inputs.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// argv front end. The SACEKIT_GRID_POINTS environment variable replaces the
// built-in default grid resolution; an explicit --grid-points flag beats
// both.
int main_with_args(int argc, const char* const* argv, std::ostream& out,
                   std::ostream& err);

}  // namespace sacekit::cli
