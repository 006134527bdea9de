#include "coinlab/numeric.hpp"

#include "coinlab/errors.hpp"

#include <mpfr.h>

#include <cmath>
#include <stdexcept>

namespace coinlab {
namespace {

// digits10 that MPFR maps back to at least `bits` binary digits.
unsigned digits10_for(unsigned bits) {
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

unsigned& current_bits() {
    static unsigned bits = [] {
        Real::default_precision(digits10_for(kDefaultPrecisionBits));
        return kDefaultPrecisionBits;
    }();
    return bits;
}

const bool kPrecisionInitialized = (current_bits(), true);

void apply_bits(unsigned bits) {
    Real::default_precision(digits10_for(bits));
    current_bits() = bits;
}

}  // namespace

unsigned precision_bits() { return current_bits(); }

PrecisionScope::PrecisionScope(unsigned bits) : saved_bits_(current_bits()) {
    if (bits < 24) throw std::invalid_argument("precision must be at least 24 bits");
    apply_bits(bits);
}

PrecisionScope::~PrecisionScope() { apply_bits(saved_bits_); }

template <>
Rational default_tolerance<Rational>() {
    return Rational(0);
}

template <>
Real default_tolerance<Real>() {
    unsigned bits = precision_bits();
    Real one(1);
    return ldexp(one, -static_cast<int>(bits - 24));
}

template <>
Rational from_rational<Rational>(const Rational& q) {
    return q;
}

template <>
Real from_rational<Real>(const Rational& q) {
    (void)precision_bits();
    return Real(q);
}

namespace {

// Decimal digits only; Integer's own string constructor would read a leading 0 as octal.
Integer parse_decimal(std::string digits, const std::string& text) {
    bool neg = false;
    if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) {
        neg = digits[0] == '-';
        digits.erase(0, 1);
    }
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        throw InvalidInput("not a number: '" + text + "'");
    auto first = digits.find_first_not_of('0');
    Integer v = first == std::string::npos ? Integer(0) : Integer(digits.substr(first));
    return neg ? Integer(-v) : v;
}

}  // namespace

Rational parse_rational(const std::string& text) {
    if (text.empty()) throw InvalidInput("empty number");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        Integer num = parse_decimal(text.substr(0, slash), text);
        Integer den = parse_decimal(text.substr(slash + 1), text);
        if (den == 0) throw InvalidInput("zero denominator in '" + text + "'");
        return Rational(num, den);
    }
    // Decimal with optional exponent, parsed exactly.
    std::string mant = text;
    long exp10 = 0;
    auto e = text.find_first_of("eE");
    if (e != std::string::npos) {
        mant = text.substr(0, e);
        const std::string ex = text.substr(e + 1);
        Integer x = parse_decimal(ex, text);
        if (mp::abs(x) > 100000) throw InvalidInput("exponent out of range in '" + text + "'");
        exp10 = x.convert_to<long>();
    }
    bool neg = false;
    if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
        neg = mant[0] == '-';
        mant.erase(0, 1);
    }
    auto dot = mant.find('.');
    if (dot != std::string::npos) {
        exp10 -= static_cast<long>(mant.size() - dot - 1);
        mant.erase(dot, 1);
    }
    Rational value{parse_decimal(mant, text)};
    Integer ten_pow = mp::pow(Integer(10), static_cast<unsigned>(std::labs(exp10)));
    if (exp10 >= 0)
        value *= Rational(ten_pow);
    else
        value /= Rational(ten_pow);
    return neg ? Rational(-value) : value;
}

std::string to_string(const Rational& q) {
    Integer num = mp::numerator(q);
    Integer den = mp::denominator(q);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

std::string to_string(const Real& x, int digits) {
    if (digits <= 0) digits = static_cast<int>(x.precision()) + 2;
    return x.str(digits, std::ios_base::scientific);
}

Rational to_rational(const Real& x) {
    mpfr_srcptr src = x.backend().data();
    if (!mpfr_number_p(src)) throw std::domain_error("non-finite value");
    if (mpfr_zero_p(src)) return Rational(0);
    Integer mant;
    mpfr_exp_t e = mpfr_get_z_2exp(mant.backend().data(), src);
    Rational r{mant};
    if (e >= 0) {
        r *= Rational(Integer(1) << static_cast<unsigned>(e));
    } else {
        r /= Rational(Integer(1) << static_cast<unsigned>(-e));
    }
    return r;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }
double to_double(const Real& x) { return x.convert_to<double>(); }

Real sqrt_real(const Real& x) { return mp::sqrt(x); }

std::size_t bitlength(const Rational& q) {
    Integer num = mp::abs(mp::numerator(q));
    Integer den = mp::denominator(q);
    std::size_t a = num == 0 ? 0 : mp::msb(num) + 1;
    std::size_t b = mp::msb(den) + 1;
    return std::max(a, b);
}

unsigned bits_below(const Rational& x) {
    if (x <= 0 || x > 1) throw std::domain_error("bits_below expects 0 < x <= 1");
    // smallest k with 2^-k <= x
    unsigned k = 0;
    Rational pow2(1);
    while (pow2 > x) {
        pow2 /= 2;
        ++k;
    }
    return k;
}

}  // namespace coinlab
