#pragma once

#include <vector>

namespace sacekit {

// Finite discrete distribution over real support points: atoms sorted by
// ascending value, strictly positive masses summing to 1. The bound
// estimators work on these exactly; continuous samples enter through their
// empirical distribution.
class DiscreteDist {
public:
    struct Atom {
        double value = 0.0;
        double mass = 0.0;
    };

    DiscreteDist() = default;

    // Builds from raw atoms: sorts, merges equal values, drops zero masses.
    // Negative masses or a total off 1 by more than 1e-9 are rejected; float
    // drift within that tolerance is kept as-is (the trimmed means divide by
    // the mass actually taken, so a 1-ulp total never skews them).
    static DiscreteDist from_atoms(std::vector<Atom> atoms);

    // Empirical distribution: every sample gets mass 1/n, ties merge.
    static DiscreteDist from_samples(const std::vector<double>& values);

    bool empty() const { return atoms_.empty(); }
    std::size_t size() const { return atoms_.size(); }
    const std::vector<Atom>& atoms() const { return atoms_; }

    double mean() const;
    double min_value() const;
    double max_value() const;

    // Mean of the `fraction` of mass taken from the top (resp. bottom) of the
    // distribution, splitting the boundary atom fractionally. fraction == 0
    // returns the limit value: the max (resp. min) of the support. These are
    // the extremal subgroup means: no mass arrangement of a given size does
    // better than greedily taking the largest (smallest) values.
    double top_trimmed_mean(double fraction) const;
    double bottom_trimmed_mean(double fraction) const;

private:
    std::vector<Atom> atoms_;
};

}  // namespace sacekit
