#pragma once

// Storing bits in a coin's bias and getting them back: the bit-string codec,
// the expansion sampler for an r-biased bit, and von Neumann unbiasing.

#include "coinlab/rational.hpp"
#include "coinlab/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace coinlab {

/// A source of coin flips, 1 for heads.
using CoinSource = std::function<int()>;

/// Flips of a coin with bias p, drawn from Rng(seed, stream).
CoinSource bernoulli_source(const Rational& p, std::uint64_t seed, std::uint64_t stream = 0);
/// Fair flips from Rng(seed, stream).
CoinSource fair_source(std::uint64_t seed, std::uint64_t stream = 0);
/// Always heads, or always tails.
CoinSource constant_source(int value);

struct BiasEncoding {
    std::string bits;  // '0'/'1', most significant first
    Rational bias;     // 0.bits in binary
    std::uint64_t trials = 0;
};

/// 64 * 2^(2s)
std::uint64_t default_trials(unsigned s);

/// Throws InvalidInput on an empty string or a character other than 0/1.
BiasEncoding encode_bias(const std::string& bits);

/// The s-bit string of k / 2^s, 0 <= k < 2^s.
std::string grid_bits(const Integer& k, unsigned s);

/// heads/trials rounded to the nearest multiple of 2^-s, ties down, capped at (2^s-1)/2^s.
std::string decode_count(std::uint64_t heads, std::uint64_t trials, unsigned s);

/// Tallies `trials` flips of `source` and decodes the fraction of heads.
std::string decode_bits(const CoinSource& source, unsigned s, std::uint64_t trials);

struct Roundtrip {
    BiasEncoding encoding;
    std::string recovered;
    std::uint64_t heads = 0;
    bool success = false;
};

/// encode_bias, then a simulated coin of that bias with the given seed, then decode.
Roundtrip roundtrip(const std::string& bits, std::uint64_t seed, std::uint64_t trials = 0);

struct ExpansionOracle {
    std::function<int(unsigned)> bit;  // bit j >= 1 of r
    unsigned h = 0;                    // bits beyond h are zero

    /// r must be dyadic in [0, 1); h is the position of its last one bit.
    static ExpansionOracle from_dyadic(const Rational& r);
    /// The value 0.b1 b2 ... bh.
    Rational value() const;
};

/// Compares fair bits z_1, z_2, ... against r's expansion; 1 iff the first
/// difference has z_j < b_j, 0 when the h bits are exhausted.
int biased_bit(const ExpansionOracle& oracle, const CoinSource& fair);
int biased_bit(const ExpansionOracle& oracle, std::uint64_t seed, std::uint64_t stream = 0);

/// Probability of output 1 by enumerating all 2^h fair prefixes. h <= 24.
Rational biased_bit_probability(const ExpansionOracle& oracle);

struct VonNeumannResult {
    std::optional<int> bit;  // empty on exhaustion
    std::uint64_t pairs = 0;
};

/// Draws pairs from `source`: (1,0) gives 1, (0,1) gives 0, equal pairs are
/// discarded. Gives up after max_pairs pairs.
VonNeumannResult von_neumann(const CoinSource& source, std::uint64_t max_pairs = 1u << 20);

}  // namespace coinlab
