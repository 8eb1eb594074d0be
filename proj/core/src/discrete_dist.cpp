#include "sacekit/discrete_dist.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sacekit/errors.hpp"

namespace sacekit {

DiscreteDist DiscreteDist::from_atoms(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.value < b.value; });

    DiscreteDist dist;
    double total = 0.0;
    for (const Atom& a : atoms) {
        if (!(std::isfinite(a.value) && std::isfinite(a.mass)))
            throw ValidationError("distribution atoms must be finite");
        if (a.mass < 0.0) {
            std::ostringstream msg;
            msg << "atom at " << a.value << " has negative mass " << a.mass;
            throw ValidationError(msg.str());
        }
        if (a.mass == 0.0) continue;
        total += a.mass;
        if (!dist.atoms_.empty() && dist.atoms_.back().value == a.value)
            dist.atoms_.back().mass += a.mass;
        else
            dist.atoms_.push_back(a);
    }
    if (!dist.atoms_.empty() && std::abs(total - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg << "atom masses sum to " << total << ", not 1";
        throw ValidationError(msg.str());
    }
    return dist;
}

DiscreteDist DiscreteDist::from_samples(const std::vector<double>& values) {
    if (values.empty()) return {};
    std::vector<Atom> atoms;
    atoms.reserve(values.size());
    const double w = 1.0 / static_cast<double>(values.size());
    for (double v : values) atoms.push_back({v, w});
    return from_atoms(std::move(atoms));
}

double DiscreteDist::mean() const {
    if (atoms_.empty()) throw ValidationError("mean of an empty distribution");
    double m = 0.0, total = 0.0;
    for (const Atom& a : atoms_) {
        m += a.mass * a.value;
        total += a.mass;
    }
    return m / total;
}

double DiscreteDist::min_value() const {
    if (atoms_.empty()) throw ValidationError("min of an empty distribution");
    return atoms_.front().value;
}

double DiscreteDist::max_value() const {
    if (atoms_.empty()) throw ValidationError("max of an empty distribution");
    return atoms_.back().value;
}

namespace {

// Shared greedy sweep: walk atoms in `order`, taking mass until `fraction`
// is reached, splitting the final atom. Returns the mean of what was taken;
// dividing by the mass actually taken keeps fraction == 1 exact even when
// the stored masses total 1 minus a few ulps. A slice inside a single atom
// returns that atom's value exactly ((take * v) / take can drift an ulp).
template <typename It>
double sweep(It first, It last, double fraction) {
    double taken = 0.0, weighted = 0.0;
    int touched = 0;
    double single = 0.0;
    for (It it = first; it != last && taken < fraction; ++it) {
        const double take = std::min(it->mass, fraction - taken);
        weighted += take * it->value;
        taken += take;
        single = it->value;
        ++touched;
    }
    return touched == 1 ? single : weighted / taken;
}

}  // namespace

double DiscreteDist::top_trimmed_mean(double fraction) const {
    if (atoms_.empty()) throw ValidationError("trimmed mean of an empty distribution");
    if (!(fraction >= 0.0 && fraction <= 1.0 + 1e-12))
        throw ValidationError("trim fraction must lie in [0, 1]");
    if (fraction == 0.0) return max_value();
    return sweep(atoms_.rbegin(), atoms_.rend(), std::min(fraction, 1.0));
}

double DiscreteDist::bottom_trimmed_mean(double fraction) const {
    if (atoms_.empty()) throw ValidationError("trimmed mean of an empty distribution");
    if (!(fraction >= 0.0 && fraction <= 1.0 + 1e-12))
        throw ValidationError("trim fraction must lie in [0, 1]");
    if (fraction == 0.0) return min_value();
    return sweep(atoms_.begin(), atoms_.end(), std::min(fraction, 1.0));
}

}  // namespace sacekit
