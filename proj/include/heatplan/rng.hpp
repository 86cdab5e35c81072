#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace heatplan::rng {

using Engine = std::mt19937_64;

/// Uniform double in [0, 1). Implemented directly on the raw engine output so
/// that streams are identical across standard library implementations.
inline double uniform(Engine& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform(Engine& engine, double lo, double hi) {
    return lo + (hi - lo) * uniform(engine);
}

/// Uniform index in [0, n). Rejection sampling, unbiased.
inline std::uint64_t uniform_index(Engine& engine, std::uint64_t n) {
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
    std::uint64_t x;
    do {
        x = engine();
    } while (x >= limit);
    return x % n;
}

/// Standard normal via Box-Muller. Consumes exactly two engine draws.
inline double normal(Engine& engine) {
    const double u1 = 1.0 - uniform(engine); // (0, 1]
    const double u2 = uniform(engine);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
}

inline double normal(Engine& engine, double mean, double stddev) {
    return mean + stddev * normal(engine);
}

/// Splitmix-style combine, used to derive independent per-job seeds.
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace heatplan::rng
