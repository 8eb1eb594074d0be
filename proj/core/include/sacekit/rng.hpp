#pragma once

#include <cmath>
#include <cstdint>

namespace sacekit {

// SplitMix64 generator. Chosen over <random> engines because its output is
// bit-exact across platforms and standard libraries, and construction is
// cheap enough to hand every simulated unit its own stream.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound), bound >= 1. Rejection removes modulo bias.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    // Standard normal via the Marsaglia polar method (no libm distribution
    // objects: those are implementation-defined and would break replay).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Purpose tags for derived streams, so consumers never collide.
inline constexpr std::uint64_t kStreamAssignment = 1;
inline constexpr std::uint64_t kStreamUnit = 2;
inline constexpr std::uint64_t kStreamEmRestart = 3;

// Derives an independent substream seed from (seed, stream, index). Each
// SplitMix64 step is a full-avalanche 64-bit mix, so chaining three steps
// decorrelates neighbouring ids and stream tags.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t index = 0) {
    SplitMix64 a(seed);
    SplitMix64 b(a.next() ^ (stream * 0xd1342543de82ef95ull));
    SplitMix64 c(b.next() ^ (index * 0x2545f4914f6cdd1dull));
    return c.next();
}

}  // namespace sacekit
