#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qlab {

// All randomness in the artifact flows through mt19937-64 engines whose seeds
// are mixed with splitmix64, so small consecutive user seeds (1, 2, 3, ...)
// still yield well-separated streams. Record as "mt19937-64/splitmix64" in
// run metadata.

inline constexpr std::uint64_t kSplitmixGamma = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t splitmix64(std::uint64_t x) {
    std::uint64_t z = x + kSplitmixGamma;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// k-th derived stream seed from a base seed.
inline std::uint64_t stream_seed(std::uint64_t base, std::uint64_t k) {
    return splitmix64(base + k * kSplitmixGamma);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(splitmix64(seed));
}

// Uniform on (0,1), never exactly 0 or 1; bit-reproducible for a given engine
// state (no implementation-defined std::distribution involved).
inline double u01(std::mt19937_64& eng) {
    return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

// Exponential with the given rate; strictly positive.
inline double exp_draw(std::mt19937_64& eng, double rate) {
    return -std::log(u01(eng)) / rate;
}

}  // namespace qlab
