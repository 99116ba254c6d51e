#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "util.hpp"

namespace qsubset {

// Derives independent-looking substream seeds from (seed, stream) pairs.
// splitmix64 finalizer: every input bit avalanches across the output, so
// adjacent stream indices give unrelated mt19937_64 initializations.
inline std::uint64_t avalanche_mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic random source with portable value mappings.
///
/// mt19937_64 raw output is standardized; the distribution mappings here are
/// fixed arithmetic (no std::*_distribution), so streams are bit-identical
/// across platforms and standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_raw() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double next_uniform(double lo, double hi) {
        return lo + (hi - lo) * next_unit();
    }

    /// Standard normal via Box-Muller; one fresh pair per call, cosine
    /// branch only, so the stream layout is explicit.
    double next_normal() {
        double u1 = 1.0 - next_unit();  // (0, 1]: keeps the log finite
        double u2 = next_unit();
        constexpr double two_pi = 6.283185307179586476925286766559;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw invalid_input("next_below: n must be positive");
        auto v = static_cast<std::uint64_t>(next_unit() * static_cast<double>(n));
        return v >= n ? n - 1 : v;
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace qsubset
