#pragma once

// Gallery of concrete coin automata.

#include "coinlab/fixed_point.hpp"

namespace coinlab {

/// Heads accepts; tails waits. Basis: 0 work, 1 Accept. One-sided.
CoinAutomaton<Rational> first_heads();

/// One flip decides: heads accepts, tails rejects. Basis: 0 work, 1 Accept, 2 Reject.
CoinAutomaton<Rational> single_flip();

/// Both channels are the identity. Basis: 0 work, 1 Accept.
/// In limit mode the accepting set is {work}.
CoinAutomaton<Rational> identity_automaton(AcceptMode mode = AcceptMode::one_sided);

/// Deterministic swap of states 0 and 1 (Accept = 2 is never reached).
/// Limit mode with accepting set {0}.
CoinAutomaton<Rational> two_cycle();

/// Walk on -K..K started at 0. Heads moves up with probability 1-p, tails
/// moves down with probability p. +K goes to Accept and -K to Reject on the
/// next step. Basis: s+K for state s, then Accept = 2K+1, Reject = 2K+2.
/// epsilon is the target gap and does not enter the transitions.
CoinAutomaton<Rational> hc_walk(const Rational& p, const Rational& epsilon, unsigned k);

/// Each step halts and rejects with probability epsilon, otherwise flips:
/// heads accepts, tails continues. Basis: 0 work, 1 Accept, 2 Reject.
CoinAutomaton<Rational> zero_vs_eps(const Rational& epsilon);

/// Looks for L = 1/epsilon consecutive heads in 2^L disjoint blocks of L
/// flips; accepts on the first all-heads block and rejects after the last.
/// Basis: 0 in-block, 1 block failed, 2 Accept, 3 Reject.
TimeDependentAutomaton<Rational> run_of_heads(const Rational& epsilon);

/// Runs the halting machine m until `copies`/2+1 runs agree and answers with
/// the majority. Tallies live in need^2 copies of m's space, need = (copies+1)/2,
/// followed by global Accept and Reject. Throws InvalidInput when m does not
/// halt with probability 1 at p = 1/2.
template <class F>
CoinAutomaton<F> amplified(const CoinAutomaton<F>& m, unsigned copies);

/// Parameters of the dimension-4 quantum distinguisher.
struct QuantumParams {
    Rational p;
    Rational epsilon;
    unsigned a = 10000;
    unsigned b = 7500;

    void validate() const;
    Rational alpha() const { return epsilon * epsilon / Rational(b); }
    /// max(128, ceil(3 log2(B / eps^2)) + 64)
    unsigned precision_bits() const;
};

/// Basis: 0, 1 (counter), 2 Accept, 3 Reject. Heads rotates the counter by
/// eps(1-p)/A, tails by -eps p/A; then with probability alpha = eps^2/B the
/// counter is measured, |0> rejecting and |1> accepting.
/// Entries are computed at the current working precision.
CoinAutomaton<Real> quantum_distinguisher(const QuantumParams& q);

/// Rotation by theta on span{|0>,|1>}, identity on Accept and Reject.
Matrix<Real> counter_rotation(const Real& theta);

/// Rebuilds the distinguisher at whatever precision is active when called.
AutomatonBuilder quantum_builder(const QuantumParams& q);

/// a(p) of the distinguisher at bias `bias`, at no less than q.precision_bits().
LimitState<Real> quantum_limit(const QuantumParams& q, const Rational& bias, unsigned min_bits = 0);

}  // namespace coinlab
