#pragma once

// Coin-flipping automata. Each step flips a coin of bias p and applies E_1
// (heads) or E_0 (tails), so one step is E_p = p E_1 + (1 - p) E_0.
// The accept measurement is part of both channels.

#include "coinlab/linalg.hpp"
#include "coinlab/rng.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace coinlab {

enum class AcceptMode { halting, one_sided, limit };

std::string to_string(AcceptMode mode);
AcceptMode parse_mode(const std::string& text);

template <class F>
class CoinAutomaton {
public:
    /// Validates both channels, the initial state and that Accept is absorbing.
    CoinAutomaton(Superoperator<F> e0, Superoperator<F> e1, DensityMatrix<F> initial, std::size_t accept,
                  std::optional<std::size_t> reject, AcceptMode mode, std::vector<std::size_t> accepting_set = {});

    std::size_t dim() const { return e0_.dim(); }
    const Superoperator<F>& e0() const { return e0_; }
    const Superoperator<F>& e1() const { return e1_; }
    const DensityMatrix<F>& initial() const { return initial_; }
    std::size_t accept_index() const { return accept_; }
    std::optional<std::size_t> reject_index() const { return reject_; }
    AcceptMode mode() const { return mode_; }
    const std::vector<std::size_t>& accepting_set() const { return accepting_set_; }

private:
    Superoperator<F> e0_;
    Superoperator<F> e1_;
    DensityMatrix<F> initial_;
    std::size_t accept_;
    std::optional<std::size_t> reject_;
    AcceptMode mode_;
    std::vector<std::size_t> accepting_set_;
};

template <class F>
CoinAutomaton<F> convert_automaton(const CoinAutomaton<Rational>& m);

/// Follows `e` by the two-outcome measurement {|A><A|, I - |A><A|}.
template <class F>
Superoperator<F> with_accept_measurement(const Superoperator<F>& e, std::size_t accept);

/// True when E(|i><i|) = |i><i|.
template <class F>
bool is_absorbing(const Superoperator<F>& e, std::size_t i, const F& tol = default_tolerance<F>());

/// E_p as the Kraus family {sqrt(p) E_1, sqrt(1-p) E_0}.
template <class F>
Superoperator<F> coin_superop(const CoinAutomaton<F>& m, const F& p);

/// Transfer matrices B_0, B_1 of one automaton.
template <class F>
struct TransferPair {
    SparseMatrix<F> b0;
    SparseMatrix<F> b1;
    SparseMatrix<F> at(const F& p) const { return mix_sparse(p, b1, b0); }
};

template <class F>
TransferPair<F> transfer_pair(const CoinAutomaton<F>& m);

/// vec(|i><i|) in dimension s.
template <class F>
Vector<F> basis_vec(std::size_t s, std::size_t i);

/// a_t(p) = v_Acc^dag B_p^t v_0.
template <class F>
F accept_prob_at(const CoinAutomaton<F>& m, const F& p, std::size_t t);

/// a_0(p), ..., a_t(p) in one pass.
template <class F>
std::vector<F> accept_curve(const CoinAutomaton<F>& m, const F& p, std::size_t t);

template <class F>
DensityMatrix<F> evolve_distribution(const CoinAutomaton<F>& m, const F& p, std::size_t t);

/// Step-dependent automaton; generator(t) gives (E_0, E_1) for step t.
template <class F>
struct TimeDependentAutomaton {
    std::size_t dim = 0;
    std::function<std::pair<Superoperator<F>, Superoperator<F>>(std::size_t)> generator;
    DensityMatrix<F> initial;
    std::size_t accept = 0;
    std::optional<std::size_t> reject;
    std::size_t horizon = 0;
};

/// Throws InvalidInput when t exceeds the horizon.
template <class F>
DensityMatrix<F> evolve_distribution(const TimeDependentAutomaton<F>& m, const F& p, std::size_t t);
template <class F>
F accept_prob_at(const TimeDependentAutomaton<F>& m, const F& p, std::size_t t);

// ---------------------------------------------------------------------------
// Monte Carlo

enum class Outcome { accept, reject, unresolved };
std::string to_string(Outcome o);

struct RunTrace {
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
    std::vector<bool> flips;  // heads = true
    std::optional<std::size_t> halt_step;
    Outcome outcome = Outcome::unresolved;
};

inline constexpr std::size_t kDefaultCutoff = 1'000'000;

/// Automaton compiled to double precision for trajectory sampling.
class Sampler {
public:
    template <class F>
    explicit Sampler(const CoinAutomaton<F>& m);
    template <class F>
    explicit Sampler(const TimeDependentAutomaton<F>& m);

    /// Deterministic in (p, cutoff, seed, trial).
    RunTrace run(double p, std::size_t cutoff, std::uint64_t seed, std::uint64_t trial = 0,
                 bool record_flips = true) const;

private:
    struct Compiled;
    std::shared_ptr<const Compiled> impl_;
};

struct MonteCarloSummary {
    std::uint64_t seed = 0;
    std::size_t trials = 0;
    std::size_t cutoff = 0;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t unresolved = 0;

    double accept_rate() const { return trials ? static_cast<double>(accepted) / trials : 0.0; }
    /// sqrt(1/(4N)), the worst-case binomial standard error.
    double standard_error() const;
};

/// Trials use streams 0..trials-1 of `seed`.
MonteCarloSummary monte_carlo(const Sampler& s, double p, std::size_t cutoff, std::size_t trials,
                              std::uint64_t seed);

template <class F>
RunTrace sample_run(const CoinAutomaton<F>& m, double p, std::size_t cutoff, std::uint64_t seed) {
    return Sampler(m).run(p, cutoff, seed);
}

}  // namespace coinlab
