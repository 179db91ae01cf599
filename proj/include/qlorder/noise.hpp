#pragma once

#include <cstdint>

namespace qlorder {

// Counter-based Gaussian noise.
//
// Uniform bits come from the SplitMix64 output function applied to
// (key + counter * golden_gamma), so sample k of a stream can be computed
// without generating samples 0..k-1. Standard normals are produced in pairs
// by the Box-Muller transform: counters 2m and 2m+1 feed the pair m.
// All of this is fixed so that Monte Carlo results reproduce bit-for-bit
// on the same platform regardless of thread scheduling.

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Key for the stream used by trial `index` of sub-experiment `stream`.
std::uint64_t derive_key(std::uint64_t base_seed, std::uint64_t stream, std::uint64_t index) noexcept;

class NoiseStream {
public:
    explicit NoiseStream(std::uint64_t key) noexcept : key_(key) {}

    /// Uniform in (0, 1], 53 bits.
    double uniform(std::uint64_t counter) const noexcept;

    /// Next standard normal deviate.
    double next() noexcept;

    std::uint64_t key() const noexcept { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t pair_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace qlorder
