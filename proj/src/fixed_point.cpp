#include "coinlab/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace coinlab {

std::string to_string(Provenance p) {
    return p == Provenance::exact_lhopital ? "exact_lhopital" : "z_extrapolation";
}

namespace {

// ---------------------------------------------------------------------------
// Polynomials in z over Integer or Complex<Integer>. Inputs are scaled to
// integer entries first; Bareiss quotients then stay integral.

bool coeff_zero(const Integer& c) { return c == 0; }
bool coeff_zero(const Complex<Integer>& c) { return c.is_zero(); }

Integer exact_quotient(const Integer& a, const Integer& b) {
    Integer q = a / b;
    if (q * b != a) throw InvariantViolation("inexact polynomial division");
    return q;
}

Complex<Integer> exact_quotient(const Complex<Integer>& a, const Complex<Integer>& b) {
    const Integer n = b.re * b.re + b.im * b.im;
    Complex<Integer> t = a * conj(b);
    return {exact_quotient(t.re, n), exact_quotient(t.im, n)};
}

template <class C>
using Poly = std::vector<C>;

template <class C>
void trim(Poly<C>& a) {
    while (!a.empty() && coeff_zero(a.back())) a.pop_back();
}

template <class C>
Poly<C> mul(const Poly<C>& a, const Poly<C>& b) {
    if (a.empty() || b.empty()) return {};
    Poly<C> r(a.size() + b.size() - 1, C(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (coeff_zero(a[i])) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            if (!coeff_zero(b[j])) r[i + j] += a[i] * b[j];
    }
    trim(r);
    return r;
}

template <class C>
Poly<C> sub(Poly<C> a, const Poly<C>& b) {
    if (a.size() < b.size()) a.resize(b.size(), C(0));
    for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
    trim(a);
    return a;
}

template <class C>
Poly<C> divexact(Poly<C> a, const Poly<C>& b) {
    if (a.empty()) return {};
    if (b.size() == 1) {
        if (b[0] == C(1)) return a;
        for (auto& c : a) c = exact_quotient(c, b[0]);
        return a;
    }
    if (a.size() < b.size()) throw InvariantViolation("inexact polynomial division");
    Poly<C> q(a.size() - b.size() + 1, C(0));
    for (std::size_t k = q.size(); k-- > 0;) {
        const C& top = a[k + b.size() - 1];
        if (coeff_zero(top)) continue;
        C c = exact_quotient(top, b.back());
        for (std::size_t j = 0; j < b.size(); ++j) a[k + j] -= c * b[j];
        q[k] = std::move(c);
    }
    for (std::size_t j = 0; j + 1 < b.size(); ++j)
        if (!coeff_zero(a[j])) throw InvariantViolation("inexact polynomial division");
    return q;
}

// lim_{z->0} z (L I - (1-z) B)^-1 R by fraction-free Gauss-Jordan elimination
// over polynomials in z. B is n x n, R is n x m, both row-major with integer
// entries. Each entry comes back as a quotient (num, den).
template <class C>
std::vector<std::pair<C, C>> bareiss_limit(std::size_t n, std::size_t m, const Integer& scale, const std::vector<C>& b,
                                           const std::vector<C>& r) {
    const std::size_t w = n + m;
    std::vector<Poly<C>> a(n * w);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            C c0 = (i == j ? C(scale) : C(0)) - b[i * n + j];
            Poly<C> p{c0, b[i * n + j]};
            trim(p);
            a[i * w + j] = std::move(p);
        }
        for (std::size_t j = 0; j < m; ++j) {
            Poly<C> p{C(0), r[i * m + j]};
            trim(p);
            a[i * w + n + j] = std::move(p);
        }
    }
    Poly<C> prev{C(1)};
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        while (piv < n && a[piv * w + k].empty()) ++piv;
        if (piv == n) throw InvariantViolation("I - (1-z)B is singular as a polynomial matrix");
        if (piv != k)
            for (std::size_t j = 0; j < w; ++j) std::swap(a[k * w + j], a[piv * w + j]);
        const Poly<C> akk = a[k * w + k];
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k) continue;
            const Poly<C> aik = a[i * w + k];
            for (std::size_t j = 0; j < w; ++j) {
                if (j == k) continue;
                Poly<C>& aij = a[i * w + j];
                const Poly<C>& akj = a[k * w + j];
                if (aij.empty() && (aik.empty() || akj.empty())) continue;
                Poly<C> t = mul(akk, aij);
                if (!aik.empty() && !akj.empty()) t = sub(std::move(t), mul(aik, akj));
                aij = divexact(std::move(t), prev);
            }
            a[i * w + k].clear();
        }
        prev = akk;
    }
    std::vector<std::pair<C, C>> out(n * m, {C(0), C(1)});
    for (std::size_t i = 0; i < n; ++i) {
        const Poly<C>& d = a[i * w + i];
        std::size_t k = 0;
        while (k < d.size() && coeff_zero(d[k])) ++k;
        if (k == d.size()) throw InvariantViolation("vanishing determinant in Abel limit");
        for (std::size_t j = 0; j < m; ++j) {
            const Poly<C>& num = a[i * w + n + j];
            for (std::size_t l = 0; l < std::min(k, num.size()); ++l)
                if (!coeff_zero(num[l])) throw InvariantViolation("Abel limit diverges");
            if (k < num.size()) out[i * m + j] = {num[k], d[k]};
        }
    }
    return out;
}

Integer denominator_lcm(const Matrix<Rational>& a) {
    Integer l(1);
    for (const auto& x : a.data()) {
        l = mp::lcm(l, Integer(mp::denominator(x.re)));
        l = mp::lcm(l, Integer(mp::denominator(x.im)));
    }
    return l;
}

Integer scaled(const Rational& x, const Integer& l) { return mp::numerator(x) * (l / mp::denominator(x)); }

bool all_real(const Matrix<Rational>& a) {
    for (const auto& x : a.data())
        if (x.im != 0) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Float extrapolation

struct Extrapolated {
    Matrix<Real> value;
    Real diff;
};

Extrapolated extrapolate(const Matrix<Real>& b, const Matrix<Real>& rhs, std::size_t points) {
    if (points < 2) throw InvalidInput("the z ladder needs at least two points");
    const unsigned bits = precision_bits();
    const std::size_t n = b.rows();
    std::vector<Real> zs;
    std::vector<std::vector<Matrix<Real>>> t(points);  // Neville tableau, t[i][j] for j <= i
    for (std::size_t k = 0; k < points; ++k) {
        // exponents run from bits/4 to bits/2
        long e = static_cast<long>(bits / 4) + static_cast<long>((bits / 4) * k / (points - 1));
        Real z = ldexp(Real(1), -static_cast<int>(e));
        Matrix<Real> m = Matrix<Real>::identity(n);
        Real one_minus = Real(1) - z;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (!b(i, j).is_zero()) m(i, j) -= b(i, j) * one_minus;
        Matrix<Real> x = solve(m, rhs);
        x *= Complex<Real>(z);
        zs.push_back(z);
        t[k].push_back(std::move(x));
        for (std::size_t j = 1; j <= k; ++j) {
            Matrix<Real> d = t[k][j - 1] - t[k - 1][j - 1];
            d *= Complex<Real>(zs[k] / (zs[k - j] - zs[k]));
            t[k].push_back(t[k][j - 1] + d);
        }
    }
    std::vector<Matrix<Real>> diag;
    for (std::size_t k = 0; k < points; ++k) diag.push_back(t[k][k]);
    Matrix<Real> d = diag[points - 1] - diag[points - 2];
    return {diag.back(), sqrt_real(max_abs2(d))};
}

Real threshold(unsigned bits) { return ldexp(Real(1), -static_cast<int>(bits / 2 - 24)); }

template <class F>
double residual(const Matrix<F>& a) {
    return std::sqrt(to_double(max_abs2(a)));
}

template <class F>
void fill_diagnostics(FixedPointOperator<F>& op, const Matrix<F>& b) {
    op.fixed_point_residual = residual(Matrix<F>(b * op.lambda - op.lambda));
    op.idempotence_residual = residual(Matrix<F>(op.lambda * op.lambda - op.lambda));
    op.max_entry = residual(op.lambda);
}

template <class Fn>
auto escalate(const LimitOptions& opts, Fn&& attempt) {
    unsigned bits = std::max(precision_bits(), opts.min_precision_bits);
    double last_error = 1.0;
    while (true) {
        PrecisionScope scope(bits);
        try {
            auto result = attempt(bits);
            if (result.has_value()) return *result;
            last_error = attempt.last_error;
        } catch (const PrecisionError& e) {
            last_error = e.achieved_error();
        }
        if (bits >= opts.max_precision_bits) break;
        bits = std::min(bits * 2, opts.max_precision_bits);
    }
    throw PrecisionError("Abel limit extrapolation did not converge by " + std::to_string(opts.max_precision_bits) +
                             " bits",
                         last_error);
}

}  // namespace

// ---------------------------------------------------------------------------

template <class F>
Matrix<F> lambda_z(const Matrix<F>& b, const F& z) {
    if (!(z > 0 && z < 1)) throw InvalidInput("z must lie in (0, 1)");
    const std::size_t n = b.rows();
    Matrix<F> m = Matrix<F>::identity(n);
    F one_minus = F(1) - z;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (!b(i, j).is_zero()) m(i, j) -= b(i, j) * one_minus;
    Matrix<F> x = inverse(m);
    x *= Complex<F>(z);
    return x;
}

Matrix<Rational> lambda_limit_apply(const Matrix<Rational>& b, const Matrix<Rational>& rhs) {
    if (!b.square() || rhs.rows() != b.rows()) throw InvalidInput("shape mismatch in lambda_limit");
    const std::size_t n = b.rows();
    const std::size_t m = rhs.cols();
    Matrix<Rational> out(n, m);
    const Integer lb = denominator_lcm(b), lr = denominator_lcm(rhs);
    // z (I - (1-z) B)^-1 R = (lb / lr) * z (lb I - (1-z) lb B)^-1 (lr R)
    const Rational factor(lb, lr);
    if (all_real(b) && all_real(rhs)) {
        std::vector<Integer> bb(n * n), rr(n * m);
        for (std::size_t k = 0; k < n * n; ++k) bb[k] = scaled(b.data()[k].re, lb);
        for (std::size_t k = 0; k < n * m; ++k) rr[k] = scaled(rhs.data()[k].re, lr);
        auto x = bareiss_limit<Integer>(n, m, lb, bb, rr);
        for (std::size_t k = 0; k < n * m; ++k)
            out.data()[k] = Complex<Rational>(Rational(x[k].first, x[k].second) * factor);
    } else {
        std::vector<Complex<Integer>> bb(n * n), rr(n * m);
        for (std::size_t k = 0; k < n * n; ++k)
            bb[k] = {scaled(b.data()[k].re, lb), scaled(b.data()[k].im, lb)};
        for (std::size_t k = 0; k < n * m; ++k)
            rr[k] = {scaled(rhs.data()[k].re, lr), scaled(rhs.data()[k].im, lr)};
        auto x = bareiss_limit<Complex<Integer>>(n, m, lb, bb, rr);
        for (std::size_t k = 0; k < n * m; ++k) {
            const auto& [num, den] = x[k];
            const Integer d = den.re * den.re + den.im * den.im;
            Complex<Integer> t = num * conj(den);
            out.data()[k] = Complex<Rational>(Rational(t.re, d) * factor, Rational(t.im, d) * factor);
        }
    }
    return out;
}

FixedPointOperator<Rational> lambda_limit(const Matrix<Rational>& b) {
    FixedPointOperator<Rational> op;
    op.lambda = lambda_limit_apply(b, Matrix<Rational>::identity(b.rows()));
    op.provenance = Provenance::exact_lhopital;
    fill_diagnostics(op, b);
    return op;
}

namespace {

struct RealAttempt {
    const RealProblem& build;
    std::size_t points;
    double last_error = 1.0;

    std::optional<LimitResult<Real>> operator()(unsigned bits) {
        auto [b, rhs] = build();
        auto ex = extrapolate(promote(b), promote(rhs), points);
        last_error = to_double(ex.diff);
        if (ex.diff > threshold(bits)) return std::nullopt;
        return LimitResult<Real>{std::move(ex.value), last_error, bits};
    }
};

}  // namespace

LimitResult<Real> lambda_limit_apply(const RealProblem& build, const LimitOptions& opts) {
    RealAttempt attempt{build, opts.ladder_points};
    return escalate(opts, attempt);
}

FixedPointOperator<Real> lambda_limit(const Matrix<Real>& b, const LimitOptions& opts) {
    RealProblem problem = [&b] { return std::pair{promote(b), Matrix<Real>::identity(b.rows())}; };
    unsigned outer = precision_bits();
    auto result = lambda_limit_apply(problem, opts);
    FixedPointOperator<Real> op;
    {
        PrecisionScope scope(std::max(outer, result.precision_bits));
        op.lambda = std::move(result.value);
        op.provenance = Provenance::z_extrapolation;
        op.extrapolation_error = result.error;
        op.precision_bits = result.precision_bits;
        fill_diagnostics(op, promote(b));
    }
    return op;
}

// ---------------------------------------------------------------------------
// Automaton level

template <class F>
Matrix<F> ReducedSystem<F>::at(const F& p) const {
    if (p < 0 || p > 1) throw InvalidInput("bias must lie in [0, 1]");
    Matrix<F> r = b1 * Complex<F>(p);
    r += b0 * Complex<F>(F(1) - p);
    return r;
}

template <class F>
std::optional<std::size_t> ReducedSystem<F>::find(std::size_t full_index) const {
    auto it = std::lower_bound(coords.begin(), coords.end(), full_index);
    if (it == coords.end() || *it != full_index) return std::nullopt;
    return static_cast<std::size_t>(it - coords.begin());
}

template <class F>
ReducedSystem<F> reduce(const CoinAutomaton<F>& m) {
    const std::size_t s = m.dim();
    const std::size_t n = s * s;
    auto pair = transfer_pair(m);
    std::vector<std::vector<std::size_t>> out_edges(n);
    for (const auto* b : {&pair.b0, &pair.b1})
        for (const auto& e : b->entries) out_edges[e.col].push_back(e.row);
    Vector<F> v = vectorize(m.initial());
    std::vector<bool> seen(n, false);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < n; ++i)
        if (!v[i].is_zero()) {
            seen[i] = true;
            queue.push_back(i);
        }
    // The accept coordinate is always kept so a(p) can be read off.
    const std::size_t acc = m.accept_index() * s + m.accept_index();
    if (!seen[acc]) {
        seen[acc] = true;
        queue.push_back(acc);
    }
    while (!queue.empty()) {
        std::size_t c = queue.front();
        queue.pop_front();
        for (auto r : out_edges[c])
            if (!seen[r]) {
                seen[r] = true;
                queue.push_back(r);
            }
    }
    ReducedSystem<F> red;
    red.dim = s;
    for (std::size_t i = 0; i < n; ++i)
        if (seen[i]) red.coords.push_back(i);
    const std::size_t k = red.coords.size();
    std::vector<std::size_t> index(n, k);
    for (std::size_t i = 0; i < k; ++i) index[red.coords[i]] = i;
    red.b0 = Matrix<F>(k, k);
    red.b1 = Matrix<F>(k, k);
    for (const auto& e : pair.b0.entries)
        if (index[e.row] < k && index[e.col] < k) red.b0(index[e.row], index[e.col]) += e.value;
    for (const auto& e : pair.b1.entries)
        if (index[e.row] < k && index[e.col] < k) red.b1(index[e.row], index[e.col]) += e.value;
    red.v0.resize(k);
    for (std::size_t i = 0; i < k; ++i) red.v0[i] = v[red.coords[i]];
    return red;
}

namespace {

template <class F>
Matrix<F> column(const Vector<F>& v) {
    Matrix<F> m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return m;
}

template <class F>
Vector<F> scatter(const ReducedSystem<F>& red, const Matrix<F>& x) {
    Vector<F> out(red.dim * red.dim);
    for (std::size_t i = 0; i < red.coords.size(); ++i) out[red.coords[i]] = x(i, 0);
    return out;
}

}  // namespace

template <class F>
LimitState<F> limit_state(const CoinAutomaton<F>& m, const F& p, const LimitOptions& opts) {
    ReducedSystem<F> red = reduce(m);
    if constexpr (is_exact_v<F>) {
        (void)opts;
        Matrix<F> x = lambda_limit_apply(red.at(p), column(red.v0));
        return {scatter(red, x), 0.0, 0};
    } else {
        RealProblem problem = [&] { return std::pair{promote(red.at(p)), promote(column(red.v0))}; };
        auto result = lambda_limit_apply(problem, opts);
        return {scatter(red, result.value), result.error, result.precision_bits};
    }
}

LimitState<Real> limit_state(const AutomatonBuilder& build, const Rational& p, const LimitOptions& opts) {
    std::optional<ReducedSystem<Real>> red;
    RealProblem problem = [&] {
        red = reduce(build());
        return std::pair{red->at(from_rational<Real>(p)), column(red->v0)};
    };
    auto result = lambda_limit_apply(problem, opts);
    return {scatter(*red, result.value), result.error, result.precision_bits};
}

template <class F>
F accepted_mass(const CoinAutomaton<F>& m, const Vector<F>& state) {
    const std::size_t s = m.dim();
    if (m.mode() == AcceptMode::limit) {
        F total(0);
        for (auto i : m.accepting_set()) total += state[i * s + i].re;
        return total;
    }
    return state[m.accept_index() * s + m.accept_index()].re;
}

template <class F>
F limiting_accept(const CoinAutomaton<F>& m, const F& p, const LimitOptions& opts) {
    if (m.mode() == AcceptMode::limit) throw InvalidInput("limiting_accept needs halting or one-sided mode");
    return accepted_mass(m, limit_state(m, p, opts).state);
}

template <class F>
F limiting_reject(const CoinAutomaton<F>& m, const F& p, const LimitOptions& opts) {
    if (!m.reject_index()) return F(0);
    const std::size_t s = m.dim();
    const std::size_t r = *m.reject_index();
    return limit_state(m, p, opts).state[r * s + r].re;
}

template <class F>
F cesaro_accept(const CoinAutomaton<F>& m, const F& p, const LimitOptions& opts) {
    if (m.mode() != AcceptMode::limit) throw InvalidInput("cesaro_accept needs limit mode");
    return accepted_mass(m, limit_state(m, p, opts).state);
}

template <class F>
F cesaro_average(const CoinAutomaton<F>& m, const F& p, std::size_t t) {
    if (t == 0) throw InvalidInput("averaging window must be positive");
    const std::size_t s = m.dim();
    SparseMatrix<F> b = transfer_pair(m).at(p);
    Vector<F> v = vectorize(m.initial());
    std::vector<std::size_t> set = m.accepting_set();
    if (set.empty()) set.push_back(m.accept_index());
    F total(0);
    for (std::size_t k = 0; k < t; ++k) {
        v = b.multiply(v);
        for (auto i : set) total += v[i * s + i].re;
    }
    return total / F(static_cast<long>(t));
}

// ---------------------------------------------------------------------------

template <class F>
SubspaceReport<F> dead_subspace(const CoinAutomaton<F>& m, const F& p) {
    const std::size_t s = m.dim();
    const std::size_t n = s * s;
    SparseMatrix<F> b = transfer_pair(m).at(p);
    Vector<F> r = basis_vec<F>(s, m.accept_index());
    Matrix<F> g(s, s);
    for (std::size_t t = 0; t <= n; ++t) {
        bool any = false;
        for (std::size_t c = 0; c < s; ++c)
            for (std::size_t d = 0; d < s; ++d) {
                const auto& x = r[c * s + d];
                if (x.is_zero()) continue;
                g(d, c) += x;
                any = true;
            }
        if (!any) break;
        r = b.left_multiply(r);
    }
    F tol(0);
    if constexpr (!is_exact_v<F>) {
        F scale = sqrt_real(max_abs2(g));
        tol = F(10) * default_tolerance<F>() * (scale > 1 ? scale : F(1));
    }
    SubspaceReport<F> rep;
    rep.dead_basis = nullspace(g, tol);
    const std::size_t k = rep.dead_basis.size();
    rep.dead_projector = Matrix<F>(s, s);
    if (k > 0) {
        Matrix<F> v(s, k);
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t i = 0; i < s; ++i) v(i, j) = rep.dead_basis[j][i];
        Matrix<F> vh = v.adjoint();
        rep.dead_projector = v * solve(Matrix<F>(vh * v), vh);
    }
    rep.live_projector = Matrix<F>::identity(s) - rep.dead_projector - Matrix<F>::unit(s, m.accept_index(), m.accept_index());
    rep.v_live = vectorize(rep.live_projector);
    rep.v_dead = vectorize(rep.dead_projector);
    return rep;
}

template <class F>
std::vector<F> live_curve(const CoinAutomaton<F>& m, const SubspaceReport<F>& sub, const F& p, std::size_t t) {
    SparseMatrix<F> b = transfer_pair(m).at(p);
    Vector<F> v = vectorize(m.initial());
    std::vector<F> out;
    out.reserve(t + 1);
    for (std::size_t k = 0;; ++k) {
        out.push_back(dot(sub.v_live, v).re);
        if (k == t) break;
        v = b.multiply(v);
    }
    return out;
}

template <class F>
F live_prob(const CoinAutomaton<F>& m, const SubspaceReport<F>& sub, const F& p, std::size_t t) {
    return live_curve(m, sub, p, t).back();
}

template <class F>
std::optional<double> leaky_check(const CoinAutomaton<F>& m_in, const F& p_in, std::size_t n_samples,
                                  std::uint64_t seed) {
    CoinAutomaton<Real> m = [&] {
        if constexpr (is_exact_v<F>)
            return convert_automaton<Real>(m_in);
        else
            return m_in;
    }();
    Real p = [&] {
        if constexpr (is_exact_v<F>)
            return from_rational<Real>(p_in);
        else
            return p_in;
    }();
    const std::size_t s = m.dim();
    auto sub = dead_subspace(m);
    if (sqrt_real(max_abs2(sub.live_projector)) <= default_tolerance<Real>()) return std::nullopt;
    SparseMatrix<Real> b = transfer_pair(m).at(p);
    Vector<Real> w = basis_vec<Real>(s, m.accept_index());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += sub.v_dead[i];
    Rng rng(seed);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n_samples; ++k) {
        Vector<Real> psi(s);
        for (std::size_t i = 0; i < s; ++i) {
            double u1 = 1.0 - rng.uniform();
            double u2 = rng.uniform();
            double rad = std::sqrt(-2.0 * std::log(u1));
            psi[i] = Complex<Real>(Real(rad * std::cos(6.283185307179586 * u2)),
                                   Real(rad * std::sin(6.283185307179586 * u2)));
        }
        psi = sub.live_projector * psi;
        Real n2(0);
        for (const auto& x : psi) n2 += norm2(x);
        if (n2 == 0) continue;
        Real inv = Real(1) / sqrt_real(n2);
        for (auto& x : psi) x *= inv;
        Vector<Real> v(s * s);
        for (std::size_t i = 0; i < s; ++i)
            for (std::size_t j = 0; j < s; ++j) v[i * s + j] = psi[i] * conj(psi[j]);
        double peak = 0;
        for (std::size_t t = 0; t <= s * s; ++t) {
            double o = std::sqrt(to_double(norm2(dot(w, v))));
            peak = std::max(peak, o);
            v = b.multiply(v);
        }
        best = std::min(best, peak);
    }
    return best;
}

#define COINLAB_INSTANTIATE(F)                                                                              \
    template Matrix<F> lambda_z(const Matrix<F>&, const F&);                                                \
    template struct ReducedSystem<F>;                                                                       \
    template ReducedSystem<F> reduce(const CoinAutomaton<F>&);                                              \
    template LimitState<F> limit_state(const CoinAutomaton<F>&, const F&, const LimitOptions&);             \
    template F accepted_mass(const CoinAutomaton<F>&, const Vector<F>&);                                    \
    template F limiting_accept(const CoinAutomaton<F>&, const F&, const LimitOptions&);                     \
    template F limiting_reject(const CoinAutomaton<F>&, const F&, const LimitOptions&);                     \
    template F cesaro_accept(const CoinAutomaton<F>&, const F&, const LimitOptions&);                       \
    template F cesaro_average(const CoinAutomaton<F>&, const F&, std::size_t);                              \
    template SubspaceReport<F> dead_subspace(const CoinAutomaton<F>&, const F&);                            \
    template std::vector<F> live_curve(const CoinAutomaton<F>&, const SubspaceReport<F>&, const F&,        \
                                       std::size_t);                                                        \
    template F live_prob(const CoinAutomaton<F>&, const SubspaceReport<F>&, const F&, std::size_t);        \
    template std::optional<double> leaky_check(const CoinAutomaton<F>&, const F&, std::size_t, std::uint64_t);

COINLAB_INSTANTIATE(Rational)
COINLAB_INSTANTIATE(Real)

}  // namespace coinlab
