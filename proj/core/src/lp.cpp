#include "sacekit/lp.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

#include "sacekit/errors.hpp"

namespace sacekit::lp {

namespace {

constexpr double kEps = 1e-9;

struct Tableau {
    std::size_t nvars = 0;       // structural variables
    std::size_t ncols = 0;       // structural + slack + artificial
    std::size_t first_art = 0;   // first artificial column
    std::vector<std::vector<double>> rows;  // each ncols + 1 wide (rhs last)
    std::vector<std::size_t> basis;         // basic column per row
    std::vector<bool> active;               // redundant rows get retired
    std::vector<double> obj;                // reduced costs, ncols + 1 wide
};

void pivot(Tableau& t, std::size_t prow, std::size_t pcol) {
    std::vector<double>& pr = t.rows[prow];
    const double pv = pr[pcol];
    for (double& v : pr) v /= pv;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (r == prow || !t.active[r]) continue;
        const double f = t.rows[r][pcol];
        if (f == 0.0) continue;
        for (std::size_t c = 0; c <= t.ncols; ++c) t.rows[r][c] -= f * pr[c];
    }
    const double f = t.obj[pcol];
    if (f != 0.0)
        for (std::size_t c = 0; c <= t.ncols; ++c) t.obj[c] -= f * pr[c];
    t.basis[prow] = pcol;
}

// Maximizes the objective currently loaded in t.obj. Entering column:
// lowest-index positive reduced cost; leaving row: min ratio, ties broken by
// lowest basis index (Bland's rule on both ends, so no cycling).
Status run_simplex(Tableau& t, bool allow_artificial_entering) {
    for (;;) {
        std::size_t pcol = t.ncols;
        for (std::size_t c = 0; c < t.ncols; ++c) {
            if (!allow_artificial_entering && c >= t.first_art) break;
            if (t.obj[c] > kEps) {
                pcol = c;
                break;
            }
        }
        if (pcol == t.ncols) return Status::optimal;

        std::size_t prow = t.rows.size();
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            if (!t.active[r]) continue;
            const double a = t.rows[r][pcol];
            if (a <= kEps) continue;
            const double ratio = t.rows[r][t.ncols] / a;
            if (ratio < best_ratio - kEps ||
                (ratio < best_ratio + kEps &&
                 (prow == t.rows.size() || t.basis[r] < t.basis[prow]))) {
                best_ratio = ratio;
                prow = r;
            }
        }
        if (prow == t.rows.size()) return Status::unbounded;
        pivot(t, prow, pcol);
    }
}

}  // namespace

Solution solve(const Problem& problem) {
    const std::size_t n = problem.objective.size();
    if (n == 0) throw ValidationError("linear program has no variables");
    for (const Constraint& c : problem.rows)
        if (c.coeffs.size() != n)
            throw ValidationError("constraint width does not match variable count");

    // Normalize to rhs >= 0, counting slack and artificial columns.
    std::vector<Constraint> rows = problem.rows;
    std::size_t nslack = 0, nart = 0;
    for (Constraint& c : rows) {
        if (c.rhs < 0.0) {
            for (double& v : c.coeffs) v = -v;
            c.rhs = -c.rhs;
            if (c.rel == Relation::le) c.rel = Relation::ge;
            else if (c.rel == Relation::ge) c.rel = Relation::le;
        }
        if (c.rel != Relation::eq) ++nslack;
        if (c.rel != Relation::le) ++nart;
    }

    Tableau t;
    t.nvars = n;
    t.first_art = n + nslack;
    t.ncols = n + nslack + nart;
    t.rows.assign(rows.size(), std::vector<double>(t.ncols + 1, 0.0));
    t.basis.assign(rows.size(), 0);
    t.active.assign(rows.size(), true);

    std::size_t slack = n, art = t.first_art;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < n; ++c) t.rows[r][c] = rows[r].coeffs[c];
        t.rows[r][t.ncols] = rows[r].rhs;
        switch (rows[r].rel) {
            case Relation::le:
                t.rows[r][slack] = 1.0;
                t.basis[r] = slack++;
                break;
            case Relation::ge:
                t.rows[r][slack++] = -1.0;
                t.rows[r][art] = 1.0;
                t.basis[r] = art++;
                break;
            case Relation::eq:
                t.rows[r][art] = 1.0;
                t.basis[r] = art++;
                break;
        }
    }

    Solution sol;

    // Phase 1: maximize -(sum of artificials); feasible iff the optimum is 0.
    if (nart > 0) {
        t.obj.assign(t.ncols + 1, 0.0);
        for (std::size_t c = t.first_art; c < t.ncols; ++c) t.obj[c] = -1.0;
        for (std::size_t r = 0; r < t.rows.size(); ++r)
            if (t.basis[r] >= t.first_art)
                for (std::size_t c = 0; c <= t.ncols; ++c) t.obj[c] += t.rows[r][c];
        // The objective cell tracks the negated phase-1 value: it starts at
        // the artificial rhs total and shrinks by every gain, so a strictly
        // positive residual means some artificial is stuck above zero.
        if (run_simplex(t, true) != Status::optimal || t.obj[t.ncols] > kEps) {
            sol.status = Status::infeasible;
            return sol;
        }
        // Drive leftover artificials out of the basis; rows that cannot
        // pivot on any real column are redundant and retire.
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            if (t.basis[r] < t.first_art) continue;
            std::size_t pcol = t.ncols;
            for (std::size_t c = 0; c < t.first_art; ++c)
                if (std::abs(t.rows[r][c]) > kEps) {
                    pcol = c;
                    break;
                }
            if (pcol == t.ncols) t.active[r] = false;
            else pivot(t, r, pcol);
        }
    }

    // Phase 2: the real objective, artificial columns banned.
    const double sign = problem.maximize ? 1.0 : -1.0;
    t.obj.assign(t.ncols + 1, 0.0);
    for (std::size_t c = 0; c < n; ++c) t.obj[c] = sign * problem.objective[c];
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (!t.active[r]) continue;
        const double f = t.obj[t.basis[r]];
        if (f == 0.0) continue;
        for (std::size_t c = 0; c <= t.ncols; ++c) t.obj[c] -= f * t.rows[r][c];
    }
    const Status status = run_simplex(t, false);
    if (status != Status::optimal) {
        sol.status = status;
        return sol;
    }

    sol.status = Status::optimal;
    sol.x.assign(n, 0.0);
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        if (t.active[r] && t.basis[r] < n) sol.x[t.basis[r]] = t.rows[r][t.ncols];
    sol.objective = 0.0;
    for (std::size_t c = 0; c < n; ++c)
        sol.objective += problem.objective[c] * sol.x[c];
    return sol;
}

}  // namespace sacekit::lp
