#pragma once

#include <cstdint>
#include <random>

namespace qcollapse {

/// Derives a child seed from a master seed and an index.
///
/// child = splitmix64_finalizer(seed + (index + 1) * 0x9E3779B97F4A7C15).
/// This mapping is part of the reproducibility contract and is fixed:
/// trial k of a run with seed s always sees the same stream, regardless
/// of how many threads execute the trials.
inline std::uint64_t mix64(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Seeded random engine handed explicitly to every stochastic operation.
///
/// Wraps std::mt19937_64 (whose raw output sequence is fully specified by
/// the standard) and converts to doubles itself, so identical seeds give
/// identical draws on any conforming platform.
class RandomEngine {
public:
    explicit RandomEngine(std::uint64_t seed = 0) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1), 53 random bits.
    double next_double() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). n must be nonzero.
    std::uint64_t next_below(std::uint64_t n) {
        // rejection sampling to avoid modulo bias
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    /// Engine for a derived stream (per-trial reproducibility).
    static RandomEngine child(std::uint64_t seed, std::uint64_t index) {
        return RandomEngine(mix64(seed, index));
    }

private:
    std::mt19937_64 gen_;
};

} // namespace qcollapse
