#include "qlorder/noise.hpp"

#include <cmath>
#include <numbers>

namespace qlorder {

namespace {
constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t derive_key(std::uint64_t base_seed, std::uint64_t stream, std::uint64_t index) noexcept {
    std::uint64_t k = splitmix64(base_seed + golden_gamma);
    k = splitmix64(k ^ (stream + 1) * golden_gamma);
    return splitmix64(k ^ (index + 1) * 0xD1B54A32D192ED03ULL);
}

double NoiseStream::uniform(std::uint64_t counter) const noexcept {
    const std::uint64_t bits = splitmix64(key_ + (counter + 1) * golden_gamma);
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

double NoiseStream::next() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform(2 * pair_);
    const double u2 = uniform(2 * pair_ + 1);
    ++pair_;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

} // namespace qlorder
