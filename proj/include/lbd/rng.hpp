#pragma once

// Reproducible randomness for the simulation harness.
//
// Generator: SplitMix64 (Steele, Lea & Flood 2014). The state advances by a
// fixed odd constant, so the k-th raw output is a pure function of
// seed + k * GAMMA; this makes the generator counter-based and lets replicate
// streams be derived in O(1):
//
//   replicate_seed(master, i) = scramble(master + (i + 1) * GAMMA)
//
// i.e. the (i+1)-th raw output of SplitMix64 seeded with `master`. Replicate i
// of a Monte Carlo run then uses SplitMix64(replicate_seed(master, i)).
// Normal deviates are produced by the inverse CDF applied to a 53-bit uniform,
// so sequences are bit-identical across platforms.

#include <cstdint>

#include "lbd/math.hpp"

namespace lbd {

inline constexpr std::uint64_t splitmix64_gamma = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t splitmix64_scramble(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64_scramble(master + (index + 1) * splitmix64_gamma);
}

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return splitmix64_scramble(state_ += splitmix64_gamma); }

    // Uniform on (0,1): 53-bit mantissa centered away from both endpoints.
    double next_unit() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_normal() { return normal_quantile(next_unit()); }

  private:
    std::uint64_t state_;
};

}  // namespace lbd
