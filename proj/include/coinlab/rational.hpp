#pragma once

// Exact univariate polynomials and rational functions over Q, rational
// interpolation of acceptance curves, real root isolation, and the
// transition-value atlas with its advice record.

#include "coinlab/automaton.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace coinlab {

class Polynomial {
public:
    Polynomial() = default;
    /// Ascending coefficients; trailing zeros are dropped.
    explicit Polynomial(std::vector<Rational> coeffs);
    static Polynomial constant(const Rational& c) { return Polynomial({c}); }
    static Polynomial x() { return Polynomial({Rational(0), Rational(1)}); }
    /// prod_i (x - r_i)
    static Polynomial from_roots(const std::vector<Rational>& roots);

    const std::vector<Rational>& coeffs() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
    bool is_zero() const { return c_.empty(); }
    Rational lead() const { return c_.empty() ? Rational(0) : c_.back(); }
    Rational coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }

    Rational operator()(const Rational& x) const;
    double eval(double x) const;
    /// Sign of P(x): -1, 0 or 1.
    int sign_at(const Rational& x) const;

    Polynomial derivative() const;
    Polynomial monic() const;
    /// Integer coefficients with gcd 1 and positive leading coefficient.
    Polynomial primitive() const;
    /// Max bitlength of numerators and denominators.
    std::size_t bitlength() const;

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(const Polynomial& o);
    Polynomial& operator*=(const Rational& s);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
    friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
    friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

private:
    void trim();
    std::vector<Rational> c_;
};

/// Quotient and remainder; throws on division by zero.
std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b);
/// Monic gcd (zero when both are zero).
Polynomial gcd(const Polynomial& a, const Polynomial& b);
/// P / gcd(P, P'), monic.
Polynomial square_free(const Polynomial& p);
std::string to_string(const Polynomial& p);  // "[c0, c1, ...]" ascending

struct RationalFunction {
    Polynomial num;
    Polynomial den = Polynomial::constant(1);
    bool reduced = false;

    Rational operator()(const Rational& x) const;
    /// Divides out the gcd and makes the denominator monic.
    RationalFunction reduce() const;
};

struct FitOptions {
    /// Degree bound D for numerator and denominator; 0 means S^2.
    unsigned max_degree = 0;
    unsigned max_attempts = 4;
};

struct FitResult {
    RationalFunction fn;
    unsigned max_degree = 0;
    std::vector<Rational> samples;
    std::vector<Rational> validation;
    unsigned attempts = 0;
};

/// Rational interpolation through 2D+3 points i/(2D+4) by Newton
/// interpolation and a truncated extended Euclidean algorithm, then exact
/// validation at 20 further points.
FitResult fit_rational(const std::function<Rational(const Rational&)>& f, unsigned max_degree,
                       unsigned max_attempts = 4);

/// Fits a(p) (or the accepting-set limit in limit mode).
FitResult fit_rational(const CoinAutomaton<Rational>& m, const FitOptions& opts = {});

/// U = (5Q-3R)(5Q-2R) and V = 25 R^2, each scaled to primitive integers.
std::pair<Polynomial, Polynomial> threshold_poly(const RationalFunction& a);

struct RootInterval {
    Rational lo;
    Rational hi;
    std::optional<Rational> exact;  // set when the root is rational
    Rational midpoint() const { return exact ? *exact : (lo + hi) / 2; }
    Rational width() const { return hi - lo; }
};

/// Distinct real roots of p in the open interval (lo, hi).
std::size_t count_roots(const Polynomial& p, const Rational& lo, const Rational& hi);

/// Isolating intervals of width <= 2^-bits for the distinct real roots of p in
/// the open interval (lo, hi), sorted. Rational roots are detected exactly.
std::vector<RootInterval> isolate_roots(const Polynomial& p, const Rational& lo, const Rational& hi,
                                        unsigned bits);

/// Shrinks `r` (an isolating interval of a root of square-free q) to width <= 2^-bits.
RootInterval refine_root(const Polynomial& q, RootInterval r, unsigned bits);

/// Bit i >= 1 after the binary point of the midpoint of r refined to width <= 2^-(i+2).
int root_bit(const Polynomial& q, const RootInterval& r, unsigned i);

struct SeparationReport {
    std::size_t root_count = 0;
    Rational observed;        // min distance between consecutive roots (midpoints or exact)
    Rational observed_lower;  // certified lower bound from the isolating intervals
    Rational mahler_bound;    // sqrt(3) d^-(d+2)/2 ||P||_2^-(d-1), rounded down
    bool holds = true;        // observed_lower >= mahler_bound, or fewer than two roots
};

/// Works on the primitive square-free integer part of p over the whole real line.
SeparationReport min_separation(const Polynomial& p);

struct TransitionAtlas {
    std::vector<std::pair<std::string, RationalFunction>> family;
    Polynomial product;                     // square-free part of prod_x U_x
    std::vector<RootInterval> potential_values;  // 0 first, then roots in (0,1), sorted
    Rational separation;                    // certified min gap, including 1 - max
    SeparationReport mahler;                // on p (1 - p) prod_x U_x
};

TransitionAtlas build_atlas(const std::vector<std::pair<std::string, RationalFunction>>& family, unsigned bits = 64);
/// Fits every member first; a failed fit aborts with its label.
TransitionAtlas build_atlas(const std::vector<std::pair<std::string, CoinAutomaton<Rational>>>& family,
                            unsigned bits = 64);

struct AdviceRecord {
    std::size_t w = 0;     // potential values <= p*
    Rational r;            // the rounded bias, a multiple of 2^-h
    unsigned h = 0;        // expansion length
    RootInterval p0;       // largest potential value <= p*
    Rational epsilon_lower;  // r - hi(p0)
    Rational epsilon_upper;  // r - lo(p0)
};

/// r depends only on the atlas and w.
AdviceRecord advice_from_count(const TransitionAtlas& atlas, std::size_t w);
/// Counts values <= p_star (ties count) and checks the replay from w alone.
AdviceRecord build_advice(const TransitionAtlas& atlas, const Rational& p_star);

/// Bit j >= 1 of a dyadic rational in [0, 1).
int expansion_bit(const Rational& r, unsigned j);

}  // namespace coinlab
