#pragma once

#include <cstdint>
#include <random>

#include "randsum/special_functions.hpp"

// All randomness flows through RandomStream so that a master seed pins every
// experiment byte-for-byte.  The engine is std::mt19937_64 (its output
// sequence is fixed by the standard); variate transforms are written out
// explicitly instead of using std::*_distribution, whose algorithms are
// implementation-defined and would break cross-toolchain reproducibility.

namespace randsum {

namespace detail {
// splitmix64: the usual 64-bit finalizer, used only to mix seed material.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}
}  // namespace detail

class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    // Substream for a labelled task: mixes (master, a, b, c) through
    // splitmix64 so that distinct labels give statistically unrelated streams
    // and identical labels reproduce the same stream.
    static RandomStream derive(std::uint64_t master, std::uint64_t a,
                               std::uint64_t b = 0, std::uint64_t c = 0) {
        std::uint64_t s = master;
        std::uint64_t h = detail::splitmix64(s);
        s ^= a * 0x9e3779b97f4a7c15ull;
        h ^= detail::splitmix64(s);
        s ^= b * 0xc2b2ae3d27d4eb4full;
        h ^= detail::splitmix64(s);
        s ^= c * 0x165667b19e3779f9ull;
        h ^= detail::splitmix64(s);
        return RandomStream(h);
    }

    // Uniform on the open interval (0, 1): 53 random bits shifted into the
    // mantissa plus a half-ulp offset, so 0 and 1 are never produced and
    // log/quantile transforms are total.
    double uniform01() {
        const std::uint64_t bits = engine_();
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal by inversion; one engine call per variate keeps the
    // draw count independent of the value, which substream accounting relies
    // on.
    double normal() { return normal_quantile(uniform01()); }

    // Exponential with rate 1.
    double exponential() { return -std::log(uniform01()); }

    std::uint64_t raw() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace randsum
