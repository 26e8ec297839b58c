#pragma once
// Seeded random streams with a fully specified output sequence.
//
// std::mt19937_64 is specified bit-for-bit by the standard, but the standard
// distributions are not, so uniform and Poisson variates are derived here.

#include <cstdint>
#include <random>

#include "hupa/core.hpp"

namespace hupa {

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of ensemble member i: mix64(mix64(base) ^ mix64(i + 1)).
/// Depends only on (base, i), never on evaluation order.
constexpr Seed derive_seed(Seed base, std::uint64_t i) noexcept {
    return Seed{mix64(mix64(base.value) ^ mix64(i + 1))};
}

class Rng {
  public:
    explicit Rng(Seed seed) : engine_(mix64(seed.value)) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    /// Uniform on [0, L), never returning L.
    double uniform_below(double L) noexcept {
        const double v = L * uniform();
        return v < L ? v : 0.0;
    }
    /// Poisson variate by counting unit-rate exponential arrivals in [0, mean].
    /// Exact for every mean; cost is O(mean), the same order as placing the points.
    std::uint64_t poisson(double mean);

    std::uint64_t next() noexcept { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace hupa
