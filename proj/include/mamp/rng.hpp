#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace mamp {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to derive independent stream seeds from a
/// master seed and a tuple of indices, so results do not depend on how work
/// is scheduled across threads.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a) noexcept {
    return splitmix64(splitmix64(master) ^ (a + 0x632BE59BD9B4E019ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) noexcept {
    return derive_seed(derive_seed(master, a), b);
}

/// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
class ComplexNormal {
public:
    explicit ComplexNormal(double variance = 1.0) : dist_(0.0, std::sqrt(variance / 2.0)) {}

    std::complex<double> operator()(Rng& rng) {
        const double re = dist_(rng);
        const double im = dist_(rng);
        return {re, im};
    }

private:
    std::normal_distribution<double> dist_;
};

} // namespace mamp
