#pragma once

#include <cstdint>
#include <random>

namespace rauzy {

// Unbiased draw from [0, n) on top of the standard-specified mt19937_64
// stream, so sequences are reproducible across platforms and library
// versions (std::uniform_int_distribution is implementation-defined).
inline std::uint64_t bounded_rand(std::mt19937_64& engine, std::uint64_t n) {
    if (n == 0) return 0;
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = engine();
    while (x >= limit) x = engine();
    return x % n;
}

}  // namespace rauzy
