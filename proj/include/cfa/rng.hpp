#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>

namespace cfa {

// Uniform draw in [0, 1) using the top 53 bits of the generator output.
// mt19937_64 has a standardized output sequence, so draws are identical
// across platforms for a given seed.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Box-Muller transform, one variate per call (two uniforms consumed).
// Avoids std::normal_distribution, whose output is implementation-defined.
inline double standard_normal(std::mt19937_64& gen) {
    const double u1 = 1.0 - uniform01(gen);  // (0, 1]: keeps the log finite
    const double u2 = uniform01(gen);
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

// FNV-1a over the raw bytes of each value appended. Used to fingerprint
// noise streams so replays can be compared cheaply.
inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;

inline void digest_append(std::uint64_t& h, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
        h ^= (bits >> (8 * i)) & 0xffu;
        h *= 1099511628211ull;
    }
}

}  // namespace cfa
