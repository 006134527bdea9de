#include "coinlab/constructions.hpp"

#include <cmath>

namespace coinlab {
namespace {

using Table = std::vector<std::vector<Rational>>;  // table[to][from]

Table zeros(std::size_t n) { return Table(n, std::vector<Rational>(n, Rational(0))); }

void stay(Table& t, std::size_t i) { t[i][i] = 1; }

CoinAutomaton<Rational> classical(const Table& tails, const Table& heads, std::size_t start, std::size_t accept,
                                  std::optional<std::size_t> reject, AcceptMode mode,
                                  std::vector<std::size_t> accepting_set = {}) {
    const std::size_t n = tails.size();
    return CoinAutomaton<Rational>(classical_channel(tails), classical_channel(heads),
                                   DensityMatrix<Rational>::basis_state(n, start), accept, reject, mode,
                                   std::move(accepting_set));
}

}  // namespace

CoinAutomaton<Rational> first_heads() {
    Table h = zeros(2), t = zeros(2);
    h[1][0] = 1;
    stay(h, 1);
    stay(t, 0);
    stay(t, 1);
    return classical(t, h, 0, 1, std::nullopt, AcceptMode::one_sided);
}

CoinAutomaton<Rational> single_flip() {
    Table h = zeros(3), t = zeros(3);
    h[1][0] = 1;
    t[2][0] = 1;
    for (std::size_t i : {1, 2}) {
        stay(h, i);
        stay(t, i);
    }
    return classical(t, h, 0, 1, 2, AcceptMode::halting);
}

CoinAutomaton<Rational> identity_automaton(AcceptMode mode) {
    auto id = Superoperator<Rational>::identity(2);
    std::vector<std::size_t> set;
    if (mode == AcceptMode::limit) set = {0};
    return CoinAutomaton<Rational>(id, id, DensityMatrix<Rational>::basis_state(2, 0), 1, std::nullopt, mode, set);
}

CoinAutomaton<Rational> two_cycle() {
    Table s = zeros(3);
    s[1][0] = 1;
    s[0][1] = 1;
    stay(s, 2);
    return classical(s, s, 0, 2, std::nullopt, AcceptMode::limit, {0});
}

CoinAutomaton<Rational> hc_walk(const Rational& p, const Rational& epsilon, unsigned k) {
    if (k < 1) throw InvalidInput("K must be at least 1");
    if (p < 0 || p > 1) throw InvalidInput("p must lie in [0, 1]");
    if (epsilon < 0 || p + epsilon > 1) throw InvalidInput("need 0 <= epsilon <= 1 - p");
    const std::size_t n = 2 * k + 3;
    const std::size_t acc = 2 * k + 1, rej = 2 * k + 2;
    const std::size_t top = 2 * k, bottom = 0;
    Table h = zeros(n), t = zeros(n);
    for (std::size_t i = bottom + 1; i < top; ++i) {
        h[i + 1][i] += 1 - p;
        h[i][i] += p;
        t[i - 1][i] += p;
        t[i][i] += 1 - p;
    }
    h[acc][top] = t[acc][top] = 1;
    h[rej][bottom] = t[rej][bottom] = 1;
    for (std::size_t i : {acc, rej}) {
        stay(h, i);
        stay(t, i);
    }
    return classical(t, h, k, acc, rej, AcceptMode::halting);
}

CoinAutomaton<Rational> zero_vs_eps(const Rational& epsilon) {
    if (epsilon <= 0 || epsilon >= 1) throw InvalidInput("epsilon must lie in (0, 1)");
    Table h = zeros(3), t = zeros(3);
    h[1][0] = 1 - epsilon;
    h[2][0] = epsilon;
    t[0][0] = 1 - epsilon;
    t[2][0] = epsilon;
    for (std::size_t i : {1, 2}) {
        stay(h, i);
        stay(t, i);
    }
    return classical(t, h, 0, 1, 2, AcceptMode::halting);
}

TimeDependentAutomaton<Rational> run_of_heads(const Rational& epsilon) {
    if (epsilon <= 0 || mp::numerator(epsilon) != 1) throw InvalidInput("1/epsilon must be a positive integer");
    const Integer inv = mp::denominator(epsilon);
    if (inv > 6) throw InvalidInput("run_of_heads supports 1/epsilon <= 6");
    const std::size_t len = inv.convert_to<std::size_t>();
    const std::size_t blocks = std::size_t{1} << len;
    enum : std::size_t { ok = 0, failed = 1, acc = 2, rej = 3 };

    auto id = Superoperator<Rational>::identity(4);
    auto gen = [len, blocks, id](std::size_t t) -> std::pair<Superoperator<Rational>, Superoperator<Rational>> {
        if (t >= len * blocks) return {id, id};
        const bool block_end = t % len == len - 1;
        const bool last = t / len == blocks - 1;
        Table h = zeros(4), tl = zeros(4);
        for (std::size_t i : {std::size_t{acc}, std::size_t{rej}}) {
            stay(h, i);
            stay(tl, i);
        }
        if (!block_end) {
            h[ok][ok] = 1;
            h[failed][failed] = 1;
            tl[failed][ok] = 1;
            tl[failed][failed] = 1;
        } else {
            const std::size_t next = last ? std::size_t{rej} : std::size_t{ok};
            h[acc][ok] = 1;
            h[next][failed] = 1;
            tl[next][ok] = 1;
            tl[next][failed] = 1;
        }
        return {classical_channel(tl), classical_channel(h)};
    };
    return TimeDependentAutomaton<Rational>{4, gen, DensityMatrix<Rational>::basis_state(4, ok), acc, rej,
                                            len * blocks};
}

// ---------------------------------------------------------------------------

template <class F>
CoinAutomaton<F> amplified(const CoinAutomaton<F>& m, unsigned copies) {
    if (copies == 0 || copies % 2 == 0) throw InvalidInput("copies must be odd");
    if (m.mode() != AcceptMode::halting || !m.reject_index())
        throw InvalidInput("amplification needs a halting machine with a reject state");
    {
        auto st = limit_state(m, F(1) / F(2));
        const std::size_t s = m.dim();
        const std::size_t a = m.accept_index(), r = *m.reject_index();
        F halted = st.state[a * s + a].re + st.state[r * s + r].re;
        F tol = is_exact_v<F> ? F(0) : F(1e-9);
        if (F(1) - halted > tol)
            throw InvalidInput("base machine halts with probability " + std::to_string(to_double(halted)) +
                               " at p = 1/2");
    }
    const std::size_t s = m.dim();
    const std::size_t need = (copies + 1) / 2;
    const std::size_t nblocks = need * need;
    const std::size_t dim = nblocks * s + 2;
    const std::size_t gacc = dim - 2, grej = dim - 1;
    const std::size_t a = m.accept_index(), r = *m.reject_index();
    auto block = [&](std::size_t x, std::size_t y) { return (x * need + y) * s; };

    Matrix<F> globals = Matrix<F>::unit(dim, gacc, gacc) + Matrix<F>::unit(dim, grej, grej);
    auto embed_channel = [&](const Superoperator<F>& e) {
        std::vector<KrausTerm<F>> terms;
        for (const auto& t : e.terms()) {
            Matrix<F> op(dim, dim);
            for (std::size_t b = 0; b < nblocks; ++b)
                for (std::size_t i = 0; i < s; ++i)
                    for (std::size_t j = 0; j < s; ++j) op(b * s + i, b * s + j) = t.op(i, j);
            terms.push_back({t.weight, std::move(op)});
        }
        terms.push_back({F(1), globals});
        return Superoperator<F>(dim, std::move(terms));
    };

    auto restart = ldl_psd(m.initial().matrix(), default_tolerance<F>());
    std::vector<KrausTerm<F>> route;
    Matrix<F> keep = globals;
    for (std::size_t x = 0; x < need; ++x)
        for (std::size_t y = 0; y < need; ++y)
            for (std::size_t i = 0; i < s; ++i)
                if (i != a && i != r) keep(block(x, y) + i, block(x, y) + i) = Complex<F>(1);
    route.push_back({F(1), keep});
    auto send = [&](std::size_t from, bool accepted, std::size_t x, std::size_t y) {
        const std::size_t nx = accepted ? x + 1 : x, ny = accepted ? y : y + 1;
        if (nx == need || ny == need) {
            route.push_back({F(1), Matrix<F>::unit(dim, accepted ? gacc : grej, from)});
            return;
        }
        for (std::size_t k = 0; k < restart.weights.size(); ++k) {
            Matrix<F> op(dim, dim);
            for (std::size_t i = 0; i < s; ++i) op(block(nx, ny) + i, from) = restart.vectors[k][i];
            route.push_back({restart.weights[k], std::move(op)});
        }
    };
    for (std::size_t x = 0; x < need; ++x)
        for (std::size_t y = 0; y < need; ++y) {
            send(block(x, y) + a, true, x, y);
            send(block(x, y) + r, false, x, y);
        }
    Superoperator<F> reroute(dim, std::move(route));

    Matrix<F> init(dim, dim);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) init(i, j) = m.initial()(i, j);

    return CoinAutomaton<F>(compose(reroute, embed_channel(m.e0())), compose(reroute, embed_channel(m.e1())),
                            DensityMatrix<F>::unchecked(std::move(init)), gacc, grej, AcceptMode::halting);
}

template CoinAutomaton<Rational> amplified(const CoinAutomaton<Rational>&, unsigned);
template CoinAutomaton<Real> amplified(const CoinAutomaton<Real>&, unsigned);

// ---------------------------------------------------------------------------

void QuantumParams::validate() const {
    if (a < 1 || b < 1) throw InvalidInput("A and B must be positive");
    if (p < 0 || epsilon < 0 || p + epsilon > 1) throw InvalidInput("need 0 <= p and 0 <= epsilon <= 1 - p");
    if (alpha() > 1) throw InvalidInput("alpha = eps^2/B must not exceed 1");
}

unsigned QuantumParams::precision_bits() const {
    if (epsilon == 0) return 128;
    double ratio = static_cast<double>(b) / to_double(epsilon * epsilon);
    long bits = static_cast<long>(std::ceil(3.0 * std::log2(ratio))) + 64;
    return static_cast<unsigned>(std::max(128L, bits));
}

Matrix<Real> counter_rotation(const Real& theta) {
    Matrix<Real> u = Matrix<Real>::identity(4);
    Real c = mp::cos(theta), s = mp::sin(theta);
    u(0, 0) = c;
    u(0, 1) = -s;
    u(1, 0) = s;
    u(1, 1) = c;
    return u;
}

CoinAutomaton<Real> quantum_distinguisher(const QuantumParams& q) {
    q.validate();
    const Real p = from_rational<Real>(q.p);
    const Real eps = from_rational<Real>(q.epsilon);
    const Real alpha = from_rational<Real>(q.alpha());
    Real heads_angle = eps * (Real(1) - p) / Real(q.a);
    Real tails_angle = -(eps * p) / Real(q.a);

    Matrix<Real> counter = Matrix<Real>::unit(4, 0, 0) + Matrix<Real>::unit(4, 1, 1);
    Superoperator<Real> measure(4, {{alpha, Matrix<Real>::unit(4, 3, 0)},
                                    {alpha, Matrix<Real>::unit(4, 2, 1)},
                                    {Real(1) - alpha, counter},
                                    {Real(1), Matrix<Real>::unit(4, 2, 2)},
                                    {Real(1), Matrix<Real>::unit(4, 3, 3)}});
    auto rotate = [](const Real& theta) { return Superoperator<Real>::from_kraus({counter_rotation(theta)}); };
    return CoinAutomaton<Real>(compose(measure, rotate(tails_angle)), compose(measure, rotate(heads_angle)),
                               DensityMatrix<Real>::basis_state(4, 0), 2, 3, AcceptMode::halting);
}

AutomatonBuilder quantum_builder(const QuantumParams& q) {
    return [q] { return quantum_distinguisher(q); };
}

LimitState<Real> quantum_limit(const QuantumParams& q, const Rational& bias, unsigned min_bits) {
    LimitOptions opts;
    opts.min_precision_bits = std::max(q.precision_bits(), min_bits);
    opts.max_precision_bits = std::max(opts.max_precision_bits, opts.min_precision_bits);
    return limit_state(quantum_builder(q), bias, opts);
}

}  // namespace coinlab
