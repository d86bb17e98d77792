#pragma once

#include <cmath>
#include <cstdint>

namespace dynphase {

// Counter-based generator built on the SplitMix64 mixer. Streams are derived
// by folding keys into the state, so (seed, t, i) or (seed, restart) always
// name the same sequence regardless of evaluation order or thread schedule.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : state_(mix_seed(seed)) {}

    /// Child stream independent of the parent for any distinct key.
    [[nodiscard]] RngStream derive(std::uint64_t key) const {
        RngStream child(0);
        child.state_ = mix64(state_ ^ (0x9e3779b97f4a7c15ULL * (key + 1)));
        return child;
    }
    [[nodiscard]] RngStream derive(std::uint64_t a, std::uint64_t b) const {
        return derive(a).derive(b);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; explicit so results are identical
    /// across standard libraries.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// +1 or -1 with equal probability.
    double sign() { return (next_u64() & 1ULL) ? 1.0 : -1.0; }

  private:
    static std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static std::uint64_t mix_seed(std::uint64_t seed) { return mix64(seed ^ 0xd1b54a32d192ed03ULL); }

    std::uint64_t state_;
};

}  // namespace dynphase
