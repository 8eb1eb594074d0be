#pragma once

#include <vector>

namespace sacekit::lp {

enum class Relation { le, eq, ge };

enum class Status { optimal, infeasible, unbounded };

struct Constraint {
    std::vector<double> coeffs;
    Relation rel = Relation::le;
    double rhs = 0.0;
};

struct Problem {
    // One coefficient per variable; variables are implicitly >= 0.
    std::vector<double> objective;
    std::vector<Constraint> rows;
    bool maximize = true;
};

struct Solution {
    Status status = Status::infeasible;
    double objective = 0.0;
    std::vector<double> x;
};

// Dense two-phase primal simplex with Bland's rule (anti-cycling). Built for
// the small verification programs this project solves - a handful of
// variables over an observed support - where a dependency on a full LP
// package would be heavier than the solver itself.
Solution solve(const Problem& problem);

}  // namespace sacekit::lp
