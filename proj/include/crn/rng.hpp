#pragma once

#include <cstdint>

namespace crn::rng {

// Counter-based generator built on the splitmix64 mixer. Every draw is a
// pure function of (seed, slot, stream), so episodes are reproducible
// bit-for-bit on any platform and runs that share a seed stay aligned
// slot-by-slot even when they consume different draws (common random
// numbers across policies/parameters).
inline constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t key(std::uint64_t seed, std::uint64_t slot,
                                   std::uint64_t stream) noexcept {
    return mix64(mix64(seed ^ 0xd6e8feb86659fd93ULL) ^ mix64(slot) ^
                 mix64(stream * 0x2545f4914f6cdd1dULL + 1));
}

// Uniform double in [0, 1) with 53 random bits.
inline constexpr double uniform(std::uint64_t seed, std::uint64_t slot,
                                std::uint64_t stream) noexcept {
    return static_cast<double>(key(seed, slot, stream) >> 11) * 0x1.0p-53;
}

inline constexpr bool bernoulli(double p, std::uint64_t seed, std::uint64_t slot,
                                std::uint64_t stream) noexcept {
    return uniform(seed, slot, stream) < p;
}

// Uniform integer in [0, n); n must be >= 1.
inline constexpr int uniform_int(int n, std::uint64_t seed, std::uint64_t slot,
                                 std::uint64_t stream) noexcept {
    return static_cast<int>(uniform(seed, slot, stream) * n);
}

} // namespace crn::rng
