#include "sacekit/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sacekit/errors.hpp"
#include "sacekit/rng.hpp"

namespace sacekit {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // log(2*pi)/2

struct EmState {
    std::vector<NormalComponent> components;
    std::vector<double> trace;
    bool converged = false;
};

// One full EM run from the given initial components. Each pass scores the
// current parameters (log-likelihood via logsumexp, responsibilities on the
// fly) while accumulating the M-step statistics, so the trace entries always
// describe the parameters actually stored when the loop stops.
EmState run_em(const std::vector<double>& samples,
               std::vector<NormalComponent> components, const EmOptions& options,
               double variance_floor) {
    const std::size_t n = samples.size();
    const std::size_t k = components.size();
    EmState state;
    double prev_ll = 0.0;

    std::vector<double> logw(k), logsd(k), nk(k), sum(k), sumsq(k), logp(k);
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        for (std::size_t j = 0; j < k; ++j) {
            logw[j] = std::log(components[j].weight);
            logsd[j] = std::log(components[j].sd);
            nk[j] = sum[j] = sumsq[j] = 0.0;
        }

        double ll = 0.0;
        for (double x : samples) {
            double top = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < k; ++j) {
                const double z = (x - components[j].mean) / components[j].sd;
                logp[j] = logw[j] - logsd[j] - kHalfLog2Pi - 0.5 * z * z;
                top = std::max(top, logp[j]);
            }
            double denom = 0.0;
            for (std::size_t j = 0; j < k; ++j) denom += std::exp(logp[j] - top);
            ll += top + std::log(denom);
            for (std::size_t j = 0; j < k; ++j) {
                const double r = std::exp(logp[j] - top) / denom;
                nk[j] += r;
                sum[j] += r * x;
                sumsq[j] += r * x * x;
            }
        }
        state.trace.push_back(ll);

        if (iter > 0 && std::abs(ll - prev_ll) <=
                            options.tolerance * (1.0 + std::abs(ll))) {
            state.converged = true;
            break;
        }
        prev_ll = ll;

        for (std::size_t j = 0; j < k; ++j) {
            components[j].weight = nk[j] / static_cast<double>(n);
            if (nk[j] <= 1e-12) continue;  // dead component keeps its shape
            const double mu = sum[j] / nk[j];
            components[j].mean = mu;
            components[j].sd =
                std::sqrt(std::max(sumsq[j] / nk[j] - mu * mu, variance_floor));
        }
    }

    state.components = std::move(components);
    return state;
}

}  // namespace

MixtureFit em_fit(const std::vector<double>& samples, int k,
                  const EmOptions& options) {
    if (k < 1) throw ValidationError("component count must be at least 1");
    if (options.restarts < 1 || options.max_iterations < 1 ||
        options.tolerance < 0.0 || options.variance_floor_factor <= 0.0)
        throw ValidationError("invalid EM options");
    const std::size_t n = samples.size();
    if (n < static_cast<std::size_t>(10 * k)) {
        std::ostringstream msg;
        msg << "need at least " << 10 * k << " samples to fit " << k
            << " components, got " << n;
        throw ValidationError(msg.str());
    }

    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double x : samples) var += (x - mean) * (x - mean);
    var /= static_cast<double>(n);
    if (var <= 0.0)
        throw ValidationError("samples have zero variance; nothing to unmix");
    const double sd = std::sqrt(var);
    const double variance_floor = options.variance_floor_factor * var;

    std::vector<double> sorted(samples);
    std::sort(sorted.begin(), sorted.end());

    MixtureFit best;
    bool have_best = false;
    for (int r = 0; r < options.restarts; ++r) {
        std::vector<NormalComponent> init(static_cast<std::size_t>(k));
        if (r == 0) {
            // Spread the means over the sample quantiles.
            for (int j = 0; j < k; ++j) {
                const std::size_t q = std::min(
                    n - 1, static_cast<std::size_t>((j + 0.5) / k *
                                                    static_cast<double>(n)));
                init[static_cast<std::size_t>(j)] = {1.0 / k, sorted[q], sd};
            }
        } else {
            SplitMix64 rng(stream_seed(options.seed, kStreamEmRestart,
                                       static_cast<std::uint64_t>(r)));
            for (int j = 0; j < k; ++j)
                init[static_cast<std::size_t>(j)] = {1.0 / k,
                                                     samples[rng.below(n)], sd};
        }

        EmState state = run_em(samples, std::move(init), options, variance_floor);
        const double ll = state.trace.back();
        if (!have_best || ll > best.loglik) {
            have_best = true;
            best.components = std::move(state.components);
            best.loglik = ll;
            best.iterations = static_cast<int>(state.trace.size());
            best.converged = state.converged;
            best.loglik_trace = std::move(state.trace);
        }
    }

    best.restarts_used = options.restarts;
    std::sort(best.components.begin(), best.components.end(),
              [](const NormalComponent& a, const NormalComponent& b) {
                  return a.mean < b.mean;
              });
    return best;
}

namespace {

struct EffectiveComponent {
    int index = 0;      // position in the original fit
    double weight = 0;  // renormalized over the surviving components
};

// Components below 1% weight are treated as absent: the cell then holds a
// single stratum and its candidate share is the whole cell.
std::vector<EffectiveComponent> effective_components(const MixtureFit& fit) {
    std::vector<EffectiveComponent> out;
    double total = 0.0;
    for (std::size_t i = 0; i < fit.components.size(); ++i) {
        if (fit.components[i].weight < 0.01) continue;
        out.push_back({static_cast<int>(i), fit.components[i].weight});
        total += fit.components[i].weight;
    }
    for (EffectiveComponent& c : out) c.weight /= total;
    return out;
}

}  // namespace

StrataIdentification identify_strata(const MixtureFit& fit_t,
                                     const MixtureFit& fit_c, double p_t,
                                     double p_c, double tol) {
    if (!fit_t.converged || !fit_c.converged)
        throw ValidationError(
            "mixture fits must have converged before strata identification");
    if (!(p_t > 0.0 && p_t <= 1.0 && p_c > 0.0 && p_c <= 1.0))
        throw ValidationError("survival rates must lie in (0, 1]");
    if (tol < 0.0) throw ValidationError("matching tolerance must be nonnegative");

    const std::vector<EffectiveComponent> comps_t = effective_components(fit_t);
    const std::vector<EffectiveComponent> comps_c = effective_components(fit_c);

    StrataIdentification ident;
    int infeasible_matches = 0;
    for (const EffectiveComponent& ct : comps_t) {
        for (const EffectiveComponent& cc : comps_c) {
            // Candidate always-survivor share seen from each side: component
            // weight scaled back to a population share by the survival rate.
            const double a = ct.weight * p_t;
            const double b = cc.weight * p_c;
            if (std::abs(a - b) > tol * std::max(a, b) + 1e-12) continue;

            const double ll = (a + b) / 2.0;
            const double ld = p_t - ll;
            const double dl = p_c - ll;
            const double dd = 1.0 - ll - ld - dl;
            if (std::min({ld, dl, dd}) < -1e-9) {
                ++infeasible_matches;
                continue;
            }
            StrataSolution sol;
            sol.pi = {ll, std::max(ld, 0.0), std::max(dl, 0.0), std::max(dd, 0.0)};
            sol.t_ll_component = ct.index;
            sol.c_ll_component = cc.index;
            sol.pi_t_candidate = a;
            sol.pi_c_candidate = b;
            ident.solutions.push_back(sol);
        }
    }

    if (ident.solutions.empty()) {
        if (infeasible_matches > 0)
            throw InfeasibleError(
                "every cross-arm component match implies a negative stratum "
                "proportion; the fitted mixtures are inconsistent with any "
                "stratum split");
        throw IdentificationError(
            "no treated component weight matches a control component weight "
            "within tolerance; the always-survivor share could not be located "
            "in both cells");
    }
    ident.ambiguous = ident.solutions.size() > 1;
    return ident;
}

std::vector<double> sace_candidates(const StrataIdentification& ident,
                                    const MixtureFit& fit_t,
                                    const MixtureFit& fit_c) {
    if (ident.solutions.empty())
        throw ValidationError("no identification solutions to evaluate");
    std::vector<double> out;
    out.reserve(ident.solutions.size());
    for (const StrataSolution& sol : ident.solutions)
        out.push_back(
            fit_t.components[static_cast<std::size_t>(sol.t_ll_component)].mean -
            fit_c.components[static_cast<std::size_t>(sol.c_ll_component)].mean);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace sacekit
