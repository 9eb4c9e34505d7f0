#pragma once

#include <cmath>
#include <cstdint>

namespace ctiler {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen because it is a public, named,
// 64-bit generator that is trivial to implement identically on every platform
// and splits cleanly into independent streams. All seeded behaviour in this
// project (synthetic map generation, oracle error injection) flows through
// this generator so outputs are stable across runs, platforms and versions.
struct SplitMix64 {
    uint64_t state = 0;

    explicit SplitMix64(uint64_t seed = 0) : state(seed) {}

    static constexpr uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        return mix(state);
    }

    /// Uniform in [0, 1). 53-bit mantissa, bias-free.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound). Fixed-point multiply keeps the mapping
    /// platform-independent (no modulo, no rejection loop).
    uint64_t next_below(uint64_t bound) {
        return static_cast<uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    /// Uniform integer in [lo, hi] inclusive.
    int64_t next_range(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(next_below(static_cast<uint64_t>(hi - lo + 1)));
    }

    /// Poisson-distributed count (Knuth multiplication method; fine for small means).
    int next_poisson(double mean);
};

inline int SplitMix64::next_poisson(double mean) {
    const double limit = std::exp(-mean);
    int k = 0;
    double p = 1.0;
    for (;;) {
        p *= next_double();
        if (p <= limit) return k;
        ++k;
    }
}

/// Derive an independent child stream from (seed, tag). Used to give each
/// object class (buildings, field lines, ...) its own sequence so adding one
/// class never perturbs another.
inline SplitMix64 split_stream(uint64_t seed, uint64_t tag) {
    return SplitMix64(SplitMix64::mix(seed ^ SplitMix64::mix(tag)));
}

/// Stable uniform in [0,1) keyed by (seed, level, row, col). Independent of
/// traversal order and worker count by construction.
inline double stable_tile_uniform(uint64_t seed, int level, int row, int col) {
    uint64_t h = seed;
    h = SplitMix64::mix(h ^ (0x9E3779B97F4A7C15ULL + static_cast<uint64_t>(level)));
    h = SplitMix64::mix(h ^ (0xC2B2AE3D27D4EB4FULL + static_cast<uint64_t>(row)));
    h = SplitMix64::mix(h ^ (0x165667B19E3779F9ULL + static_cast<uint64_t>(col)));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

} // namespace ctiler
