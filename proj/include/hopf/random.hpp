#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace hopf {

/// SplitMix64 finaliser; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Combine words into one stream key (order-sensitive).
constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a) { return mix64(mix64(seed) ^ mix64(a + 0x632BE59BD9B4E019ULL)); }
constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return derive_key(derive_key(seed, a), b);
}

/// Counter-based generator: draw i of stream `key` is a pure function of (key, i),
/// so any ensemble member or any time step can be generated independently.
class CounterRng {
public:
    explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

    constexpr std::uint64_t bits(std::uint64_t counter) const {
        return mix64(key_ ^ mix64(counter));
    }

    /// Uniform on the open interval (0, 1).
    double uniform(std::uint64_t counter) const {
        return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Pair of independent standard normals from counters (2i, 2i+1), Box-Muller.
    std::pair<double, double> normal_pair(std::uint64_t i) const {
        const double u1 = uniform(2 * i), u2 = uniform(2 * i + 1);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(angle), r * std::sin(angle)};
    }

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
};

}  // namespace hopf
