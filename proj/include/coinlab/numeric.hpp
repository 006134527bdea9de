#pragma once

// Scalar fields used throughout coinlab.
//
// Every numeric routine is written once over a real field F and instantiated
// for two fields:
//   Rational  exact arbitrary-precision fractions (GMP)
//   Real      binary floating point with a run-time precision (MPFR)
// Complex numbers are pairs over F; std::complex is not usable with either.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <string>
#include <type_traits>

namespace coinlab {

namespace mp = boost::multiprecision;

using Integer = mp::number<mp::gmp_int, mp::et_off>;
using Rational = mp::number<mp::gmp_rational, mp::et_off>;
using Real = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;

template <class F>
inline constexpr bool is_exact_v = std::is_same_v<F, Rational>;

/// Working precision (in bits) applied to newly created Real values.
unsigned precision_bits();

/// Sets the Real working precision for the lifetime of the scope.
///
/// The MPFR default precision is process-global; scopes must be nested, not
/// interleaved across threads.
class PrecisionScope {
public:
    explicit PrecisionScope(unsigned bits);
    ~PrecisionScope();
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    unsigned saved_bits_;
};

inline constexpr unsigned kDefaultPrecisionBits = 128;

/// Default comparison tolerance of a field: 0 when exact, 2^-(bits-24) otherwise.
template <class F>
F default_tolerance();

template <class F>
F from_rational(const Rational& q);

Rational parse_rational(const std::string& text);  // "3", "-3/4", "0.125", "1e-3"
std::string to_string(const Rational& q);           // canonical "num/den" or "num"
std::string to_string(const Real& x, int digits = 0);  // digits==0: round-trip precision

/// Exact value of a finite Real.
Rational to_rational(const Real& x);

double to_double(const Rational& q);
double to_double(const Real& x);

Real sqrt_real(const Real& x);

/// Number of bits needed to write |q|'s numerator and denominator (max of both).
std::size_t bitlength(const Rational& q);

/// Integer floor(log2(1/x)) rounded up, for 0 < x <= 1.
unsigned bits_below(const Rational& x);

}  // namespace coinlab
