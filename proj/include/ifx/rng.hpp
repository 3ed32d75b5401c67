#pragma once

#include <cstdint>

namespace ifx {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen over std::mt19937 because its
// output stream is fully pinned by these constants, so scenario coefficients
// are reproducible bit-for-bit from the seed alone, in any language:
//   state += 0x9e3779b97f4a7c15
//   z = state; z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//   return z ^ (z >> 31)
// Doubles are drawn as (next() >> 11) * 2^-53, uniform on [0, 1).
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Independent child stream; the parent advances by one draw.
    SplitMix64 split() { return SplitMix64(next()); }
};

}  // namespace ifx
