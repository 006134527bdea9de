#include "coinlab/automaton.hpp"

#include <cmath>
#include <complex>
#include <memory>

namespace coinlab {

std::string to_string(AcceptMode mode) {
    switch (mode) {
        case AcceptMode::halting: return "halting";
        case AcceptMode::one_sided: return "one_sided";
        case AcceptMode::limit: return "limit";
    }
    return "?";
}

AcceptMode parse_mode(const std::string& text) {
    if (text == "halting") return AcceptMode::halting;
    if (text == "one_sided" || text == "one-sided") return AcceptMode::one_sided;
    if (text == "limit") return AcceptMode::limit;
    throw InvalidInput("unknown acceptance mode '" + text + "'");
}

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::accept: return "accept";
        case Outcome::reject: return "reject";
        case Outcome::unresolved: return "unresolved";
    }
    return "?";
}

template <class F>
bool is_absorbing(const Superoperator<F>& e, std::size_t i, const F& tol) {
    Matrix<F> unit = Matrix<F>::unit(e.dim(), i, i);
    Matrix<F> diff = apply_raw(e, unit) - unit;
    return max_abs2(diff) <= tol * tol;
}

template <class F>
CoinAutomaton<F>::CoinAutomaton(Superoperator<F> e0, Superoperator<F> e1, DensityMatrix<F> initial,
                                std::size_t accept, std::optional<std::size_t> reject, AcceptMode mode,
                                std::vector<std::size_t> accepting_set)
    : e0_(std::move(e0)),
      e1_(std::move(e1)),
      initial_(std::move(initial)),
      accept_(accept),
      reject_(reject),
      mode_(mode),
      accepting_set_(std::move(accepting_set)) {
    const std::size_t s = e0_.dim();
    if (e1_.dim() != s) throw InvalidInput("e0 and e1 have different dimensions");
    if (initial_.dim() != s) throw InvalidInput("initial state has the wrong dimension");
    if (accept_ >= s) throw InvalidInput("accept index out of range");
    if (reject_ && (*reject_ >= s || *reject_ == accept_)) throw InvalidInput("bad reject index");
    for (auto i : accepting_set_)
        if (i >= s) throw InvalidInput("accepting_set index out of range");
    if (mode_ == AcceptMode::limit && accepting_set_.empty())
        throw InvalidInput("limit mode needs a nonempty accepting_set");
    auto r0 = validate_kraus(e0_);
    if (!r0.pass) throw InvalidInput("e0 is not trace preserving (residual " + std::to_string(r0.residual) + ")");
    auto r1 = validate_kraus(e1_);
    if (!r1.pass) throw InvalidInput("e1 is not trace preserving (residual " + std::to_string(r1.residual) + ")");
    if (!is_absorbing(e0_, accept_) || !is_absorbing(e1_, accept_))
        throw InvalidInput("accept state is not absorbing");
    if (reject_ && (!is_absorbing(e0_, *reject_) || !is_absorbing(e1_, *reject_)))
        throw InvalidInput("reject state is not absorbing");
}

template <class F>
CoinAutomaton<F> convert_automaton(const CoinAutomaton<Rational>& m) {
    if constexpr (is_exact_v<F>) {
        return m;
    } else {
        return CoinAutomaton<F>(convert_superop<F>(m.e0()), convert_superop<F>(m.e1()),
                                DensityMatrix<F>::unchecked(convert_matrix<F>(m.initial().matrix())),
                                m.accept_index(), m.reject_index(), m.mode(), m.accepting_set());
    }
}

template <class F>
Superoperator<F> with_accept_measurement(const Superoperator<F>& e, std::size_t accept) {
    const std::size_t s = e.dim();
    Matrix<F> hit = Matrix<F>::unit(s, accept, accept);
    Matrix<F> miss = Matrix<F>::identity(s) - hit;
    Superoperator<F> measure(s, {{F(1), hit}, {F(1), miss}});
    return compose(measure, e);
}

template <class F>
Superoperator<F> coin_superop(const CoinAutomaton<F>& m, const F& p) {
    if (p < 0 || p > 1) throw InvalidInput("bias must lie in [0, 1]");
    return mix(p, m.e1(), m.e0());
}

template <class F>
TransferPair<F> transfer_pair(const CoinAutomaton<F>& m) {
    return {sparse_superop(m.e0()), sparse_superop(m.e1())};
}

template <class F>
Vector<F> basis_vec(std::size_t s, std::size_t i) {
    Vector<F> v(s * s);
    v[i * s + i] = Complex<F>(1);
    return v;
}

template <class F>
std::vector<F> accept_curve(const CoinAutomaton<F>& m, const F& p, std::size_t t) {
    if (p < 0 || p > 1) throw InvalidInput("bias must lie in [0, 1]");
    const std::size_t s = m.dim();
    SparseMatrix<F> b = transfer_pair(m).at(p);
    Vector<F> v = vectorize(m.initial());
    const std::size_t acc = m.accept_index() * s + m.accept_index();
    std::vector<F> out;
    out.reserve(t + 1);
    out.push_back(v[acc].re);
    for (std::size_t k = 0; k < t; ++k) {
        v = b.multiply(v);
        out.push_back(v[acc].re);
    }
    return out;
}

template <class F>
F accept_prob_at(const CoinAutomaton<F>& m, const F& p, std::size_t t) {
    return accept_curve(m, p, t).back();
}

template <class F>
DensityMatrix<F> evolve_distribution(const CoinAutomaton<F>& m, const F& p, std::size_t t) {
    Superoperator<F> e = coin_superop(m, p);
    Matrix<F> rho = m.initial().matrix();
    for (std::size_t k = 0; k < t; ++k) rho = apply_raw(e, rho);
    return DensityMatrix<F>::unchecked(std::move(rho));
}

template <class F>
DensityMatrix<F> evolve_distribution(const TimeDependentAutomaton<F>& m, const F& p, std::size_t t) {
    if (t > m.horizon) throw InvalidInput("step count exceeds the automaton horizon");
    if (p < 0 || p > 1) throw InvalidInput("bias must lie in [0, 1]");
    Matrix<F> rho = m.initial.matrix();
    for (std::size_t k = 0; k < t; ++k) {
        auto [e0, e1] = m.generator(k);
        rho = apply_raw(mix(p, e1, e0), rho);
    }
    return DensityMatrix<F>::unchecked(std::move(rho));
}

template <class F>
F accept_prob_at(const TimeDependentAutomaton<F>& m, const F& p, std::size_t t) {
    return evolve_distribution(m, p, t)(m.accept, m.accept).re;
}

// ---------------------------------------------------------------------------
// Sampler

namespace {

using cd = std::complex<double>;

struct SparseOp {
    // entries grouped by row
    std::vector<std::size_t> rows;
    std::vector<std::vector<std::pair<std::size_t, cd>>> row_entries;
    std::vector<std::size_t> cols;
};

struct StepOps {
    std::vector<SparseOp> ops;
    std::vector<std::vector<std::size_t>> by_column;  // op indices touching each column
};

template <class F>
cd to_cd(const Complex<F>& z) {
    return {to_double(z.re), to_double(z.im)};
}

template <class F>
StepOps compile_channel(const Superoperator<F>& e) {
    const std::size_t s = e.dim();
    StepOps out;
    out.by_column.resize(s);
    for (const auto& t : e.terms()) {
        double w = std::sqrt(to_double(t.weight));
        if (w == 0) continue;
        SparseOp op;
        std::vector<bool> seen(s, false);
        for (std::size_t i = 0; i < s; ++i) {
            std::vector<std::pair<std::size_t, cd>> row;
            for (std::size_t j = 0; j < s; ++j)
                if (!t.op(i, j).is_zero()) {
                    row.emplace_back(j, w * to_cd(t.op(i, j)));
                    if (!seen[j]) {
                        seen[j] = true;
                        op.cols.push_back(j);
                    }
                }
            if (!row.empty()) {
                op.rows.push_back(i);
                op.row_entries.push_back(std::move(row));
            }
        }
        if (op.rows.empty()) continue;
        for (auto c : op.cols) out.by_column[c].push_back(out.ops.size());
        out.ops.push_back(std::move(op));
    }
    return out;
}

}  // namespace

struct Sampler::Compiled {
    std::size_t dim = 0;
    std::size_t accept = 0;
    std::optional<std::size_t> reject;
    bool time_dependent = false;
    std::size_t horizon = 0;
    // Index 0 tails, 1 heads; one pair per step for time-dependent automata.
    std::vector<std::pair<StepOps, StepOps>> steps;
    std::vector<double> init_weights;  // cumulative
    std::vector<std::vector<cd>> init_states;
};

namespace {

template <class F>
void compile_initial(const DensityMatrix<F>& rho, std::vector<double>& cum, std::vector<std::vector<cd>>& states) {
    auto ldl = ldl_psd(rho.matrix(), default_tolerance<F>());
    double total = 0;
    for (std::size_t k = 0; k < ldl.weights.size(); ++k) {
        std::vector<cd> v;
        double n2 = 0;
        for (const auto& x : ldl.vectors[k]) {
            v.push_back(to_cd(x));
            n2 += std::norm(v.back());
        }
        double w = to_double(ldl.weights[k]) * n2;
        if (w <= 0) continue;
        for (auto& x : v) x /= std::sqrt(n2);
        total += w;
        cum.push_back(total);
        states.push_back(std::move(v));
    }
    for (auto& c : cum) c /= total;
}

}  // namespace

template <class F>
Sampler::Sampler(const CoinAutomaton<F>& m) {
    auto c = std::make_shared<Compiled>();
    c->dim = m.dim();
    c->accept = m.accept_index();
    c->reject = m.reject_index();
    c->steps.emplace_back(compile_channel(m.e0()), compile_channel(m.e1()));
    compile_initial(m.initial(), c->init_weights, c->init_states);
    impl_ = std::move(c);
}

template <class F>
Sampler::Sampler(const TimeDependentAutomaton<F>& m) {
    auto c = std::make_shared<Compiled>();
    c->dim = m.dim;
    c->accept = m.accept;
    c->reject = m.reject;
    c->time_dependent = true;
    c->horizon = m.horizon;
    for (std::size_t t = 0; t < m.horizon; ++t) {
        auto [e0, e1] = m.generator(t);
        c->steps.emplace_back(compile_channel(e0), compile_channel(e1));
    }
    compile_initial(m.initial, c->init_weights, c->init_states);
    impl_ = std::move(c);
}

RunTrace Sampler::run(double p, std::size_t cutoff, std::uint64_t seed, std::uint64_t trial,
                      bool record_flips) const {
    if (cutoff < 1) throw InvalidInput("cutoff must be at least 1");
    if (!(p >= 0 && p <= 1)) throw InvalidInput("bias must lie in [0, 1]");
    const Compiled& c = *impl_;
    RunTrace trace;
    trace.seed = seed;
    trace.trial = trial;
    Rng rng(seed, trial);

    double u = rng.uniform();
    std::size_t pick = 0;
    while (pick + 1 < c.init_weights.size() && u >= c.init_weights[pick]) ++pick;
    std::vector<cd> psi = c.init_states[pick];
    std::vector<cd> next(c.dim);
    std::vector<std::size_t> op_stamp;
    std::vector<std::size_t> candidates;
    std::vector<double> probs;
    std::size_t epoch = 0;

    // Returns true when halted.
    auto measure = [&](std::size_t step) {
        double pa = std::norm(psi[c.accept]);
        double pr = c.reject ? std::norm(psi[*c.reject]) : 0.0;
        if (pa == 0 && pr == 0) return false;
        double v = rng.uniform();
        if (v < pa) {
            trace.outcome = Outcome::accept;
            trace.halt_step = step;
            return true;
        }
        if (v < pa + pr) {
            trace.outcome = Outcome::reject;
            trace.halt_step = step;
            return true;
        }
        psi[c.accept] = 0;
        if (c.reject) psi[*c.reject] = 0;
        double n2 = 0;
        for (const auto& x : psi) n2 += std::norm(x);
        if (n2 <= 0) {
            trace.outcome = pa >= pr ? Outcome::accept : Outcome::reject;
            trace.halt_step = step;
            return true;
        }
        double inv = 1.0 / std::sqrt(n2);
        for (auto& x : psi) x *= inv;
        return false;
    };

    if (measure(0)) return trace;
    for (std::size_t step = 1; step <= cutoff; ++step) {
        if (c.time_dependent && step > c.horizon) break;
        bool heads = rng.bernoulli(p);
        if (record_flips) trace.flips.push_back(heads);
        const auto& pair = c.steps[c.time_dependent ? step - 1 : 0];
        const StepOps& ops = heads ? pair.second : pair.first;
        if (op_stamp.size() < ops.ops.size()) op_stamp.assign(ops.ops.size(), 0);
        ++epoch;
        candidates.clear();
        for (std::size_t j = 0; j < c.dim; ++j) {
            if (psi[j] == cd(0)) continue;
            for (auto k : ops.by_column[j])
                if (op_stamp[k] != epoch) {
                    op_stamp[k] = epoch;
                    candidates.push_back(k);
                }
        }
        probs.assign(candidates.size(), 0.0);
        double total = 0;
        for (std::size_t n = 0; n < candidates.size(); ++n) {
            const SparseOp& op = ops.ops[candidates[n]];
            double pr = 0;
            for (const auto& row : op.row_entries) {
                cd s = 0;
                for (const auto& [j, v] : row) s += v * psi[j];
                pr += std::norm(s);
            }
            total += pr;
            probs[n] = total;
        }
        if (candidates.empty() || total <= 0) throw InvariantViolation("trajectory lost all probability mass");
        double v = rng.uniform() * total;
        std::size_t chosen = 0;
        while (chosen + 1 < candidates.size() && v >= probs[chosen]) ++chosen;
        const SparseOp& op = ops.ops[candidates[chosen]];
        std::fill(next.begin(), next.end(), cd(0));
        double n2 = 0;
        for (std::size_t r = 0; r < op.rows.size(); ++r) {
            cd s = 0;
            for (const auto& [j, w] : op.row_entries[r]) s += w * psi[j];
            next[op.rows[r]] = s;
            n2 += std::norm(s);
        }
        double inv = 1.0 / std::sqrt(n2);
        for (std::size_t j = 0; j < c.dim; ++j) psi[j] = next[j] * inv;
        if (measure(step)) return trace;
    }
    return trace;
}

double MonteCarloSummary::standard_error() const {
    return trials ? std::sqrt(1.0 / (4.0 * static_cast<double>(trials))) : 0.0;
}

MonteCarloSummary monte_carlo(const Sampler& s, double p, std::size_t cutoff, std::size_t trials,
                              std::uint64_t seed) {
    MonteCarloSummary sum;
    sum.seed = seed;
    sum.trials = trials;
    sum.cutoff = cutoff;
    for (std::size_t k = 0; k < trials; ++k) {
        RunTrace t = s.run(p, cutoff, seed, k, false);
        switch (t.outcome) {
            case Outcome::accept: ++sum.accepted; break;
            case Outcome::reject: ++sum.rejected; break;
            case Outcome::unresolved: ++sum.unresolved; break;
        }
    }
    return sum;
}

#define COINLAB_INSTANTIATE(F)                                                                        \
    template class CoinAutomaton<F>;                                                                  \
    template CoinAutomaton<F> convert_automaton<F>(const CoinAutomaton<Rational>&);                   \
    template Superoperator<F> with_accept_measurement(const Superoperator<F>&, std::size_t);          \
    template bool is_absorbing(const Superoperator<F>&, std::size_t, const F&);                       \
    template Superoperator<F> coin_superop(const CoinAutomaton<F>&, const F&);                        \
    template TransferPair<F> transfer_pair(const CoinAutomaton<F>&);                                  \
    template Vector<F> basis_vec<F>(std::size_t, std::size_t);                                        \
    template std::vector<F> accept_curve(const CoinAutomaton<F>&, const F&, std::size_t);             \
    template F accept_prob_at(const CoinAutomaton<F>&, const F&, std::size_t);                        \
    template DensityMatrix<F> evolve_distribution(const CoinAutomaton<F>&, const F&, std::size_t);    \
    template DensityMatrix<F> evolve_distribution(const TimeDependentAutomaton<F>&, const F&,         \
                                                  std::size_t);                                       \
    template F accept_prob_at(const TimeDependentAutomaton<F>&, const F&, std::size_t);               \
    template Sampler::Sampler(const CoinAutomaton<F>&);                                               \
    template Sampler::Sampler(const TimeDependentAutomaton<F>&);

COINLAB_INSTANTIATE(Rational)
COINLAB_INSTANTIATE(Real)

}  // namespace coinlab
