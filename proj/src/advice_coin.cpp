#include "coinlab/advice_coin.hpp"

#include "coinlab/errors.hpp"

#include <memory>

namespace coinlab {

CoinSource bernoulli_source(const Rational& p, std::uint64_t seed, std::uint64_t stream) {
    if (p < 0 || p > 1) throw InvalidInput("bias must lie in [0, 1]");
    auto rng = std::make_shared<Rng>(seed, stream);
    // Precompute the 64-bit threshold once; Rng::bernoulli(Rational) would redo it per flip.
    if (p == 1) return [] { return 1; };
    Integer scaled = (mp::numerator(p) << 64) / mp::denominator(p);
    const std::uint64_t threshold = scaled.convert_to<std::uint64_t>();
    return [rng, threshold] { return rng->next() < threshold ? 1 : 0; };
}

CoinSource fair_source(std::uint64_t seed, std::uint64_t stream) {
    auto rng = std::make_shared<Rng>(seed, stream);
    return [rng] { return rng->bit() ? 1 : 0; };
}

CoinSource constant_source(int value) {
    return [value] { return value; };
}

std::uint64_t default_trials(unsigned s) {
    if (s > 28) throw InvalidInput("bit string too long for the default trial budget");
    return std::uint64_t{64} << (2 * s);
}

BiasEncoding encode_bias(const std::string& bits) {
    if (bits.empty()) throw InvalidInput("empty bit string");
    Integer k(0);
    for (char c : bits) {
        if (c != '0' && c != '1') throw InvalidInput(std::string("not a bit: '") + c + "'");
        k = 2 * k + (c == '1' ? 1 : 0);
    }
    const unsigned s = static_cast<unsigned>(bits.size());
    BiasEncoding e;
    e.bits = bits;
    e.bias = Rational(k, Integer(1) << s);
    e.trials = s <= 28 ? default_trials(s) : 0;
    return e;
}

std::string grid_bits(const Integer& k, unsigned s) {
    std::string out(s, '0');
    for (unsigned i = 0; i < s; ++i)
        if (bit_test(k, s - 1 - i)) out[i] = '1';
    return out;
}

std::string decode_count(std::uint64_t heads, std::uint64_t trials, unsigned s) {
    if (trials == 0) throw InvalidInput("trials must be positive");
    if (heads > trials) throw InvalidInput("more heads than trials");
    if (s == 0) return "";
    // nearest k to heads * 2^s / trials, ties toward the smaller k
    Integer num = Integer(heads) << s;
    Integer k = num / trials;
    Integer rem = num - k * trials;
    if (2 * rem > trials) k += 1;
    const Integer top = (Integer(1) << s) - 1;
    if (k > top) k = top;
    return grid_bits(k, s);
}

std::string decode_bits(const CoinSource& source, unsigned s, std::uint64_t trials) {
    if (trials == 0) throw InvalidInput("trials must be positive");
    std::uint64_t heads = 0;
    for (std::uint64_t t = 0; t < trials; ++t) heads += source() ? 1 : 0;
    return decode_count(heads, trials, s);
}

Roundtrip roundtrip(const std::string& bits, std::uint64_t seed, std::uint64_t trials) {
    Roundtrip r;
    r.encoding = encode_bias(bits);
    if (trials) r.encoding.trials = trials;
    if (r.encoding.trials == 0) throw InvalidInput("trials must be positive");
    auto coin = bernoulli_source(r.encoding.bias, seed);
    for (std::uint64_t t = 0; t < r.encoding.trials; ++t) r.heads += coin();
    const unsigned s = static_cast<unsigned>(bits.size());
    r.recovered = decode_count(r.heads, r.encoding.trials, s);
    r.success = r.recovered == bits;
    return r;
}

ExpansionOracle ExpansionOracle::from_dyadic(const Rational& r) {
    if (r < 0 || r >= 1) throw InvalidInput("expansion oracle needs r in [0, 1)");
    const Integer& den = mp::denominator(r);
    if ((den & (den - 1)) != 0) throw InvalidInput("r is not dyadic: " + to_string(r));
    ExpansionOracle o;
    o.h = r == 0 ? 0 : static_cast<unsigned>(msb(den));
    const unsigned h = o.h;
    const Integer num = mp::numerator(r);
    o.bit = [num, h](unsigned j) -> int {
        if (j == 0 || j > h) return 0;
        return bit_test(num, h - j) ? 1 : 0;
    };
    return o;
}

Rational ExpansionOracle::value() const {
    Integer k(0);
    for (unsigned j = 1; j <= h; ++j) k = 2 * k + bit(j);
    return Rational(k, Integer(1) << h);
}

int biased_bit(const ExpansionOracle& oracle, const CoinSource& fair) {
    for (unsigned j = 1; j <= oracle.h; ++j) {
        const int z = fair(), b = oracle.bit(j);
        if (z < b) return 1;
        if (z > b) return 0;
    }
    return 0;
}

int biased_bit(const ExpansionOracle& oracle, std::uint64_t seed, std::uint64_t stream) {
    return biased_bit(oracle, fair_source(seed, stream));
}

Rational biased_bit_probability(const ExpansionOracle& oracle) {
    if (oracle.h > 24) throw InvalidInput("enumeration limited to h <= 24");
    const std::uint64_t n = std::uint64_t{1} << oracle.h;
    std::uint64_t ones = 0;
    for (std::uint64_t prefix = 0; prefix < n; ++prefix) {
        unsigned pos = 0;
        // z_1 is the most significant bit of the prefix
        CoinSource z = [&] { return static_cast<int>((prefix >> (oracle.h - 1 - pos++)) & 1); };
        ones += biased_bit(oracle, z);
    }
    return Rational(Integer(ones), Integer(n));
}

VonNeumannResult von_neumann(const CoinSource& source, std::uint64_t max_pairs) {
    VonNeumannResult r;
    while (r.pairs < max_pairs) {
        const int a = source(), b = source();
        ++r.pairs;
        if (a != b) {
            r.bit = a;
            return r;
        }
    }
    return r;
}

}  // namespace coinlab
