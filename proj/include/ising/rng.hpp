#pragma once

#include <cstdint>
#include <initializer_list>

namespace ising {

// SplitMix64: tiny, fast, splittable 64-bit generator.  Chosen because the
// harness needs millions of short independent streams (one per chain), keyed
// deterministically by (seed, cell, trial, sample) so results do not depend
// on the parallel schedule.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n) via Lemire's multiply-shift reduction.
    // Bias is < n/2^64, far below anything observable here.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }
};

// One finalization round of the SplitMix64 output function; a good 64-bit
// mixer in its own right.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derive a stream key by folding index words into the seed, one mixing round
// per word.  Distinct tuples give statistically independent streams.
inline std::uint64_t stream_key(std::uint64_t seed,
                                std::initializer_list<std::uint64_t> parts) {
    std::uint64_t k = mix64(seed + 0x9E3779B97F4A7C15ULL);
    for (std::uint64_t part : parts)
        k = mix64(k ^ (part + 0x9E3779B97F4A7C15ULL + (k << 6) + (k >> 2)));
    return k;
}

inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a) {
    return stream_key(seed, {a});
}
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b) {
    return stream_key(seed, {a, b});
}
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b, std::uint64_t c) {
    return stream_key(seed, {a, b, c});
}

} // namespace ising
