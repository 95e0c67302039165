#pragma once

#include <cmath>
#include <cstdint>

namespace attractor {

/**
 * SplitMix64 — the project-wide deterministic random generator.
 *
 * All randomized behaviour (sphere grids for m >= 4, noise draws, test
 * fixtures) goes through this generator so that runs are reproducible
 * bit-for-bit from a 64-bit seed on one platform, and to within libm
 * rounding across platforms. The stream layout is fixed:
 *
 *   - next_u64():    state += 0x9E3779B97F4A7C15, then the xor-shift-multiply
 *                    finalizer (Steele, Lea, Flood); consumes one increment.
 *   - uniform():     one next_u64(); top 53 bits scaled to [0, 1).
 *   - gaussian():    exactly two uniform() draws, Box-Muller cosine branch.
 *   - ball sample:   m gaussian() draws then one uniform() for the radius,
 *                    i.e. 2m + 1 increments per sample (see oracle module).
 */
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + uniform() * (hi - lo);
    }

    /// Standard normal draw; consumes exactly two uniforms.
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 0x1.0p-70) u1 = 0x1.0p-70; // keep log() finite
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::uint64_t state_;
};

} // namespace attractor
