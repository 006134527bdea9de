#pragma once

// Counter-based splittable generator.
//
// A stream is identified by (seed, stream id); the k-th output is a pure
// function of (seed, stream, k). Trials keyed by distinct stream ids give the
// same results whether they run sequentially or concurrently.

#include "coinlab/numeric.hpp"

#include <cstdint>

namespace coinlab {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

    std::uint64_t seed_key() const { return key_; }

    std::uint64_t next() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    /// Child generator; independent of this one's future outputs.
    Rng split(std::uint64_t stream) const { return Rng(key_, stream); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bit() { return (next() >> 63) != 0; }

    bool bernoulli(double p) { return uniform() < p; }

    /// Exact for dyadic p with at most 64 fractional bits; otherwise p is
    /// rounded down to a multiple of 2^-64.
    bool bernoulli(const Rational& p);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

inline bool Rng::bernoulli(const Rational& p) {
    if (p <= 0) return false;
    if (p >= 1) return true;
    Integer scaled = mp::numerator(p) << 64;
    scaled /= mp::denominator(p);
    std::uint64_t threshold = scaled.convert_to<std::uint64_t>();
    return next() < threshold;
}

}  // namespace coinlab
