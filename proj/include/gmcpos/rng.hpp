#pragma once

#include <cstdint>

namespace gmcpos {

/// SplitMix64: the 64-bit shift-multiply generator from Steele, Lea and
/// Flood's "Fast splittable pseudorandom number generators". Chosen over
/// the platform engines because its output is fully pinned by these three
/// constants, so seeded runs reproduce across compilers and platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform draw from [0, n) by rejection sampling; exactly unbiased.
    std::uint64_t uniform(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n; // 2^64 mod n
        std::uint64_t u = next();
        while (u < threshold) u = next();
        return u % n;
    }

private:
    std::uint64_t state_;
};

} // namespace gmcpos
