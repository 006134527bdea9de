#pragma once

// Abel limits of transfer matrices.
//
//   Lambda_z = z (I - (1-z) B)^-1,   Lambda = lim_{z -> 0} Lambda_z
//
// Exact mode solves over polynomials in z by fraction-free elimination and
// takes the limit of each quotient c(z)/d(z) at the lowest nonzero order of d.
// Float mode evaluates Lambda_z on a ladder of small z and extrapolates to 0.

#include "coinlab/automaton.hpp"

#include <functional>
#include <optional>

namespace coinlab {

struct LimitOptions {
    /// Float mode gives up above this precision.
    unsigned max_precision_bits = 1024;
    /// Float mode starts at max(current precision, this).
    unsigned min_precision_bits = 0;
    /// Number of z values; the Richardson order is one less.
    std::size_t ladder_points = 3;
};

enum class Provenance { exact_lhopital, z_extrapolation };
std::string to_string(Provenance p);

template <class F>
struct FixedPointOperator {
    Matrix<F> lambda;
    Provenance provenance = Provenance::exact_lhopital;
    double fixed_point_residual = 0;  // max |B Lambda - Lambda|
    double idempotence_residual = 0;  // max |Lambda^2 - Lambda|
    double max_entry = 0;             // max |Lambda_ij|
    double extrapolation_error = 0;   // 0 in exact mode
    unsigned precision_bits = 0;      // 0 in exact mode
};

/// z (I - (1-z) B)^-1 for 0 < z < 1.
template <class F>
Matrix<F> lambda_z(const Matrix<F>& b, const F& z);

FixedPointOperator<Rational> lambda_limit(const Matrix<Rational>& b);
/// Escalates precision on non-convergence; throws PrecisionError at the cap.
FixedPointOperator<Real> lambda_limit(const Matrix<Real>& b, const LimitOptions& opts = {});

/// Lambda * rhs without forming Lambda.
Matrix<Rational> lambda_limit_apply(const Matrix<Rational>& b, const Matrix<Rational>& rhs);

template <class F>
struct LimitResult {
    Matrix<F> value;
    double error = 0;
    unsigned precision_bits = 0;
};

/// Builds (B, rhs) at the current working precision; called again after
/// every precision increase so irrational inputs are recomputed.
using RealProblem = std::function<std::pair<Matrix<Real>, Matrix<Real>>()>;
LimitResult<Real> lambda_limit_apply(const RealProblem& build, const LimitOptions& opts = {});

// ---------------------------------------------------------------------------
// Automaton level

/// Transfer matrices restricted to the coordinates reachable from supp(v_0)
/// under B_0 and B_1. The span of those coordinates is invariant, so limits
/// computed on it agree with the full S^2 computation.
template <class F>
struct ReducedSystem {
    std::size_t dim = 0;              // S
    std::vector<std::size_t> coords;  // reduced index -> full vec index
    Matrix<F> b0, b1;
    Vector<F> v0;

    Matrix<F> at(const F& p) const;
    std::optional<std::size_t> find(std::size_t full_index) const;
};

template <class F>
ReducedSystem<F> reduce(const CoinAutomaton<F>& m);

/// Lambda_p v_0 in full vec coordinates.
template <class F>
struct LimitState {
    Vector<F> state;
    double error = 0;
    unsigned precision_bits = 0;
};

template <class F>
LimitState<F> limit_state(const CoinAutomaton<F>& m, const F& p, const LimitOptions& opts = {});

using AutomatonBuilder = std::function<CoinAutomaton<Real>()>;
/// Rebuilds the automaton at each precision level.
LimitState<Real> limit_state(const AutomatonBuilder& build, const Rational& p, const LimitOptions& opts = {});

/// a(p) = v_Acc^dag Lambda_p v_0 (halting and one-sided modes).
template <class F>
F limiting_accept(const CoinAutomaton<F>& m, const F& p, const LimitOptions& opts = {});

/// Mass that ends in the reject state; 0 without one.
template <class F>
F limiting_reject(const CoinAutomaton<F>& m, const F& p, const LimitOptions& opts = {});

/// w^dag Lambda_p v_0 with w the projector onto the accepting set (limit mode).
template <class F>
F cesaro_accept(const CoinAutomaton<F>& m, const F& p, const LimitOptions& opts = {});

/// Accept (or, in limit mode, accepting-set) mass read off a limit state.
template <class F>
F accepted_mass(const CoinAutomaton<F>& m, const Vector<F>& state);

/// (a_1 + ... + a_T)/T for the accepting set, as a finite-time cross-check.
template <class F>
F cesaro_average(const CoinAutomaton<F>& m, const F& p, std::size_t t);

// ---------------------------------------------------------------------------
// Dead and live subspaces

template <class F>
struct SubspaceReport {
    std::vector<Vector<F>> dead_basis;  // state vectors of length S
    Matrix<F> dead_projector;
    Matrix<F> live_projector;  // I - Pi_D - |A><A|
    Vector<F> v_live;          // vec(live_projector)
    Vector<F> v_dead;          // vec(dead_projector)
};

/// Kernel of sum_{t <= S^2} G_t where psi^dag G_t psi is the accept
/// probability after t steps of B_p from |psi><psi|.
template <class F>
SubspaceReport<F> dead_subspace(const CoinAutomaton<F>& m, const F& p = F(1) / F(2));

/// g_t(p) = v_live^dag B_p^t v_0.
template <class F>
F live_prob(const CoinAutomaton<F>& m, const SubspaceReport<F>& sub, const F& p, std::size_t t);

/// g_0(p), ..., g_t(p).
template <class F>
std::vector<F> live_curve(const CoinAutomaton<F>& m, const SubspaceReport<F>& sub, const F& p, std::size_t t);

/// Minimum over random live pure states of max_{k <= S^2}
/// |(v_Acc + v_Dead)^dag B_p^k vec(rho)|. Empty when the live subspace is {0}.
template <class F>
std::optional<double> leaky_check(const CoinAutomaton<F>& m, const F& p, std::size_t n_samples, std::uint64_t seed);

}  // namespace coinlab
