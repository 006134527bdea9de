#include "coinlab/rational.hpp"

#include "coinlab/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace coinlab {

Polynomial::Polynomial(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

void Polynomial::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Polynomial Polynomial::from_roots(const std::vector<Rational>& roots) {
    Polynomial p = constant(1);
    for (const auto& r : roots) p *= Polynomial({-r, Rational(1)});
    return p;
}

Rational Polynomial::operator()(const Rational& x) const {
    Rational acc(0);
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
}

double Polynomial::eval(double x) const {
    double acc = 0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + to_double(c_[i]);
    return acc;
}

int Polynomial::sign_at(const Rational& x) const {
    Rational v = (*this)(x);
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

Polynomial Polynomial::derivative() const {
    std::vector<Rational> d;
    for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * static_cast<long>(i));
    return Polynomial(std::move(d));
}

Polynomial Polynomial::monic() const {
    if (c_.empty()) return {};
    Polynomial r = *this;
    Rational inv = Rational(1) / lead();
    for (auto& c : r.c_) c *= inv;
    return r;
}

Polynomial Polynomial::primitive() const {
    if (c_.empty()) return {};
    Integer l(1);
    for (const auto& c : c_) l = mp::lcm(l, Integer(mp::denominator(c)));
    std::vector<Integer> ints;
    Integer g(0);
    for (const auto& c : c_) {
        Integer v = mp::numerator(c) * (l / mp::denominator(c));
        g = mp::gcd(g, mp::abs(v));
        ints.push_back(std::move(v));
    }
    if (ints.back() < 0) g = -g;
    std::vector<Rational> out;
    for (auto& v : ints) out.emplace_back(v / g);
    return Polynomial(std::move(out));
}

std::size_t Polynomial::bitlength() const {
    std::size_t b = 0;
    for (const auto& c : c_) b = std::max(b, coinlab::bitlength(c));
    return b;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    if (c_.size() < o.c_.size()) c_.resize(o.c_.size(), Rational(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    if (c_.size() < o.c_.size()) c_.resize(o.c_.size(), Rational(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& o) {
    if (c_.empty() || o.c_.empty()) {
        c_.clear();
        return *this;
    }
    std::vector<Rational> r(c_.size() + o.c_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        for (std::size_t j = 0; j < o.c_.size(); ++j)
            if (o.c_[j] != 0) r[i + j] += c_[i] * o.c_[j];
    }
    c_ = std::move(r);
    trim();
    return *this;
}

Polynomial& Polynomial::operator*=(const Rational& s) {
    if (s == 0) {
        c_.clear();
        return *this;
    }
    for (auto& c : c_) c *= s;
    return *this;
}

std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b) {
    if (b.is_zero()) throw InvalidInput("polynomial division by zero");
    if (a.degree() < b.degree()) return {Polynomial(), a};
    std::vector<Rational> rem = a.coeffs();
    const auto& bc = b.coeffs();
    const std::size_t db = bc.size() - 1;
    std::vector<Rational> q(rem.size() - db, Rational(0));
    const Rational inv = Rational(1) / bc.back();
    for (std::size_t k = q.size(); k-- > 0;) {
        Rational c = rem[k + db] * inv;
        if (c == 0) continue;
        for (std::size_t j = 0; j <= db; ++j) rem[k + j] -= c * bc[j];
        q[k] = std::move(c);
    }
    rem.resize(db);
    return {Polynomial(std::move(q)), Polynomial(std::move(rem))};
}

Polynomial gcd(const Polynomial& a, const Polynomial& b) {
    Polynomial x = a, y = b;
    while (!y.is_zero()) {
        Polynomial r = divmod(x, y).second;
        x = std::move(y);
        y = r.primitive();
    }
    return x.monic();
}

Polynomial square_free(const Polynomial& p) {
    if (p.degree() < 1) return p.monic();
    Polynomial g = gcd(p, p.derivative());
    return divmod(p, g).first.monic();
}

std::string to_string(const Polynomial& p) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < p.coeffs().size(); ++i) os << (i ? ", " : "") << to_string(p.coeffs()[i]);
    os << ']';
    return os.str();
}

// ---------------------------------------------------------------------------

Rational RationalFunction::operator()(const Rational& x) const {
    Rational d = den(x);
    if (d == 0) throw InvalidInput("rational function has a pole at " + to_string(x));
    return num(x) / d;
}

RationalFunction RationalFunction::reduce() const {
    if (den.is_zero()) throw InvalidInput("zero denominator");
    RationalFunction r;
    if (num.is_zero()) {
        r.num = Polynomial();
        r.den = Polynomial::constant(1);
    } else {
        Polynomial g = gcd(num, den);
        r.num = divmod(num, g).first;
        r.den = divmod(den, g).first;
        Rational lead = r.den.lead();
        r.num = r.num * (Rational(1) / lead);
        r.den = r.den.monic();
    }
    r.reduced = true;
    return r;
}

namespace {

// Newton form through (xs, ys), expanded to monomial coefficients.
Polynomial newton_interpolate(const std::vector<Rational>& xs, const std::vector<Rational>& ys) {
    const std::size_t n = xs.size();
    std::vector<Rational> dd = ys;
    for (std::size_t j = 1; j < n; ++j)
        for (std::size_t i = n - 1; i >= j; --i) {
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j]);
            if (i == j) break;
        }
    Polynomial p = Polynomial::constant(dd[n - 1]);
    for (std::size_t k = n - 1; k-- > 0;) {
        p *= Polynomial({-xs[k], Rational(1)});
        p += Polynomial::constant(dd[k]);
    }
    return p;
}

std::optional<RationalFunction> reconstruct(const std::vector<Rational>& xs, const std::vector<Rational>& ys,
                                            unsigned d) {
    Polynomial g = newton_interpolate(xs, ys);
    Polynomial r0 = Polynomial::from_roots(xs), r1 = g;
    Polynomial t0, t1 = Polynomial::constant(1);
    while (!r1.is_zero() && r1.degree() > static_cast<int>(d)) {
        auto [q, r] = divmod(r0, r1);
        Polynomial t = t0 - q * t1;
        r0 = std::move(r1);
        r1 = std::move(r);
        t0 = std::move(t1);
        t1 = std::move(t);
    }
    if (t1.is_zero() || t1.degree() > static_cast<int>(d)) return std::nullopt;
    RationalFunction fn{r1, t1, false};
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (t1(xs[i]) == 0) return std::nullopt;
        if (fn(xs[i]) != ys[i]) return std::nullopt;
    }
    return fn.reduce();
}

}  // namespace

FitResult fit_rational(const std::function<Rational(const Rational&)>& f, unsigned max_degree,
                       unsigned max_attempts) {
    if (max_degree == 0) throw InvalidInput("max_degree must be positive");
    const unsigned n = 2 * max_degree + 3;
    const Rational step(1, 2 * max_degree + 4);
    for (unsigned attempt = 0; attempt < max_attempts; ++attempt) {
        // attempt k shifts the grid by k/7 of a step
        const Rational shift(attempt, 7);
        std::vector<Rational> xs, ys;
        for (unsigned i = 1; i <= n; ++i) {
            xs.push_back((Rational(i) + shift) * step);
            ys.push_back(f(xs.back()));
        }
        auto fn = reconstruct(xs, ys, max_degree);
        if (!fn) continue;
        FitResult out;
        out.fn = *fn;
        out.max_degree = max_degree;
        out.samples = xs;
        out.attempts = attempt + 1;
        bool ok = true;
        for (unsigned j = 0; j < 20 && ok; ++j) {
            Rational x(3 * j + 1, 61);
            if (std::find(xs.begin(), xs.end(), x) != xs.end()) x = Rational(3 * j + 2, 61);
            out.validation.push_back(x);
            if (fn->den(x) == 0 || (*fn)(x) != f(x)) ok = false;
        }
        if (ok) return out;
    }
    throw InvariantViolation("rational fit failed after " + std::to_string(max_attempts) + " attempts");
}

FitResult fit_rational(const CoinAutomaton<Rational>& m, const FitOptions& opts) {
    unsigned d = opts.max_degree ? opts.max_degree : static_cast<unsigned>(m.dim() * m.dim());
    auto f = [&m](const Rational& p) {
        return m.mode() == AcceptMode::limit ? cesaro_accept(m, p) : limiting_accept(m, p);
    };
    return fit_rational(f, d, opts.max_attempts);
}

std::pair<Polynomial, Polynomial> threshold_poly(const RationalFunction& a) {
    const Polynomial& q = a.num;
    const Polynomial& r = a.den;
    Polynomial u = (Rational(5) * q - Rational(3) * r) * (Rational(5) * q - Rational(2) * r);
    Polynomial v = Rational(25) * r * r;
    return {u.primitive(), v.primitive()};
}

// ---------------------------------------------------------------------------
// Root isolation

namespace {

std::vector<Polynomial> sturm_chain(const Polynomial& p) {
    std::vector<Polynomial> chain{p, p.derivative()};
    while (!chain.back().is_zero() && chain.back().degree() > 0) {
        Polynomial r = divmod(chain[chain.size() - 2], chain.back()).second;
        if (r.is_zero()) break;
        // Positive rescaling keeps the sign pattern and the numbers small.
        Polynomial s = r.primitive();
        if ((s.lead() > 0) == (r.lead() > 0)) s = Rational(-1) * s;
        chain.push_back(std::move(s));
    }
    if (chain.back().is_zero()) chain.pop_back();
    return chain;
}

int variations(const std::vector<Polynomial>& chain, const Rational& x) {
    int v = 0, last = 0;
    for (const auto& p : chain) {
        int s = p.sign_at(x);
        if (s == 0) continue;
        if (last != 0 && s != last) ++v;
        last = s;
    }
    return v;
}

struct Isolator {
    Polynomial p;  // square-free
    std::vector<Polynomial> chain;
    Rational target;

    std::size_t count(const Rational& a, const Rational& b) const {
        if (!(a < b)) return 0;
        int c = variations(chain, a) - variations(chain, b) - (p.sign_at(b) == 0 ? 1 : 0);
        return static_cast<std::size_t>(std::max(c, 0));
    }

    // Interval around an exact root m inside (a, b), no other roots, endpoints non-roots.
    RootInterval around(const Rational& m, const Rational& a, const Rational& b) const {
        Rational d = std::min({target / 2, (m - a) / 2, (b - m) / 2});
        while (count(m - d, m + d) != 1 || p.sign_at(m - d) == 0 || p.sign_at(m + d) == 0) d /= 2;
        return {m - d, m + d, m};
    }

    void run(Rational a, Rational b, std::size_t c, std::vector<RootInterval>& out) const {
        while (c == 1 && b - a > target) {
            Rational m = (a + b) / 2;
            if (p.sign_at(m) == 0) {
                out.push_back(around(m, a, b));
                return;
            }
            if (count(a, m) == 1)
                b = m;
            else
                a = m;
        }
        if (c == 0) return;
        if (c == 1) {
            out.push_back({a, b, std::nullopt});
            return;
        }
        Rational m = (a + b) / 2;
        if (p.sign_at(m) == 0) {
            RootInterval mid = around(m, a, b);
            std::size_t left = count(a, mid.lo);
            out.push_back(mid);
            run(a, mid.lo, left, out);
            run(mid.hi, b, c - left - 1, out);
        } else {
            std::size_t left = count(a, m);
            run(a, m, left, out);
            run(m, b, c - left, out);
        }
    }
};

// Simplest rational strictly inside (lo, hi), lo < hi.
Rational simplest_between(Rational lo, Rational hi) {
    // continued-fraction walk
    Integer fl = mp::numerator(lo) / mp::denominator(lo);
    if (lo < 0) {
        // floor for negatives
        if (Rational(fl) != lo) fl -= 1;
    }
    if (Rational(fl + 1) < hi) {
        Integer cand = fl + 1;
        if (lo < 0 && hi > 0) return Rational(0);
        return Rational(cand);
    }
    // lo and hi share the integer part fl (hi may equal fl+1)
    Rational flr(fl);
    Rational a = lo - flr, b = hi - flr;  // 0 <= a < b <= 1
    if (a == 0) {
        // (0, b): 1/ceil(1/b) is inside unless 1/b is an integer, then use 1/(1/b + 1)
        Rational inv = Rational(1) / b;
        Integer c = mp::numerator(inv) / mp::denominator(inv) + 1;
        return flr + Rational(1) / Rational(c);
    }
    // x in (a, b) iff 1/x in (1/b, 1/a)
    return flr + Rational(1) / simplest_between(Rational(1) / b, Rational(1) / a);
}

Rational pow2_neg(unsigned bits) { return Rational(Integer(1), Integer(1) << bits); }

}  // namespace

std::size_t count_roots(const Polynomial& p, const Rational& lo, const Rational& hi) {
    if (p.is_zero()) throw InvalidInput("zero polynomial has infinitely many roots");
    Polynomial q = square_free(p);
    if (q.degree() < 1) return 0;
    Isolator iso{q, sturm_chain(q), Rational(0)};
    return iso.count(lo, hi);
}

std::vector<RootInterval> isolate_roots(const Polynomial& p, const Rational& lo, const Rational& hi, unsigned bits) {
    if (p.is_zero()) throw InvalidInput("zero polynomial has infinitely many roots");
    if (!(lo < hi)) throw InvalidInput("isolate_roots needs lo < hi");
    Polynomial q = square_free(p);
    if (q.degree() < 1) return {};
    Isolator iso{q, sturm_chain(q), pow2_neg(bits)};
    std::vector<RootInterval> out;
    iso.run(lo, hi, iso.count(lo, hi), out);
    for (auto& r : out) {
        if (r.exact) continue;
        Rational s = simplest_between(r.lo, r.hi);
        if (q.sign_at(s) == 0) r.exact = s;
    }
    std::sort(out.begin(), out.end(), [](const RootInterval& a, const RootInterval& b) { return a.lo < b.lo; });
    return out;
}

RootInterval refine_root(const Polynomial& q, RootInterval r, unsigned bits) {
    const Rational target = pow2_neg(bits);
    if (r.exact) {
        while (r.hi - r.lo > target) {
            Rational d = (r.hi - r.lo) / 4;
            Rational lo = *r.exact - d, hi = *r.exact + d;
            if (q.sign_at(lo) == 0 || q.sign_at(hi) == 0) {
                r.lo = (*r.exact + r.lo) / 2;
                r.hi = (*r.exact + r.hi) / 2;
                continue;
            }
            r.lo = lo;
            r.hi = hi;
        }
        return r;
    }
    int slo = q.sign_at(r.lo);
    while (r.hi - r.lo > target) {
        Rational m = (r.lo + r.hi) / 2;
        int sm = q.sign_at(m);
        if (sm == 0) {
            r.exact = m;
            return refine_root(q, r, bits);
        }
        if (sm == slo)
            r.lo = m;
        else
            r.hi = m;
    }
    return r;
}

int expansion_bit(const Rational& r, unsigned j) {
    Rational scaled = r * Rational(Integer(1) << j);
    Integer fl = mp::numerator(scaled) / mp::denominator(scaled);
    if (scaled < 0 && Rational(fl) != scaled) fl -= 1;
    return static_cast<int>(Integer(fl & 1) != 0);
}

int root_bit(const Polynomial& q, const RootInterval& r, unsigned i) {
    RootInterval s = refine_root(q, r, i + 2);
    return expansion_bit(s.exact ? *s.exact : s.midpoint(), i);
}

SeparationReport min_separation(const Polynomial& p) {
    if (p.is_zero()) throw InvalidInput("zero polynomial");
    SeparationReport rep;
    Polynomial q = square_free(p).primitive();
    const int d = q.degree();
    if (d < 1) return rep;
    // Cauchy bound on |roots|
    Rational bound(0);
    for (int i = 0; i < d; ++i) bound = std::max(bound, mp::abs(q.coeff(i) / q.lead()));
    bound += 1;
    auto roots = isolate_roots(q, -bound, bound, 64);
    rep.root_count = roots.size();
    {
        PrecisionScope scope(128);
        Real norm2(0);
        for (const auto& c : q.coeffs()) norm2 += from_rational<Real>(c * c);
        Real dd(d);
        Real b = mp::sqrt(Real(3)) * mp::pow(dd, -(dd + 2) / 2) * mp::pow(mp::sqrt(norm2), -(dd - 1));
        rep.mahler_bound = to_rational(b) * (Rational(1) - pow2_neg(100));
    }
    if (roots.size() < 2) return rep;
    // Refine until every interval is much narrower than its gaps.
    unsigned bits = 64;
    while (true) {
        bool fine = true;
        for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
            Rational gap = roots[i + 1].lo - roots[i].hi;
            Rational w = std::max(roots[i].width(), roots[i + 1].width());
            if (gap <= w * 16) fine = false;
        }
        if (fine) break;
        bits *= 2;
        for (auto& r : roots) r = refine_root(q, r, bits);
    }
    bool first = true;
    for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
        Rational obs = roots[i + 1].midpoint() - roots[i].midpoint();
        Rational lower = (roots[i + 1].exact ? *roots[i + 1].exact : roots[i + 1].lo) -
                         (roots[i].exact ? *roots[i].exact : roots[i].hi);
        if (first || obs < rep.observed) rep.observed = obs;
        if (first || lower < rep.observed_lower) rep.observed_lower = lower;
        first = false;
    }
    rep.holds = rep.observed_lower >= rep.mahler_bound;
    return rep;
}

// ---------------------------------------------------------------------------
// Atlas and advice

TransitionAtlas build_atlas(const std::vector<std::pair<std::string, RationalFunction>>& family, unsigned bits) {
    TransitionAtlas atlas;
    atlas.family = family;
    Polynomial prod = Polynomial::constant(1);
    for (const auto& [label, fn] : family) {
        auto [u, v] = threshold_poly(fn.reduced ? fn : fn.reduce());
        (void)v;
        if (u.is_zero()) throw InvalidInput("member '" + label + "' is identically at a threshold");
        prod *= u;
    }
    atlas.product = square_free(prod);
    atlas.potential_values.push_back({Rational(0), Rational(0), Rational(0)});
    if (atlas.product.degree() >= 1) {
        auto roots = isolate_roots(atlas.product, Rational(0), Rational(1), bits);
        atlas.potential_values.insert(atlas.potential_values.end(), roots.begin(), roots.end());
    }
    // Certified gaps; refine until each gap dominates the interval widths.
    auto lo_of = [](const RootInterval& r) { return r.exact ? *r.exact : r.lo; };
    auto hi_of = [](const RootInterval& r) { return r.exact ? *r.exact : r.hi; };
    unsigned b = bits;
    while (true) {
        bool fine = true;
        Rational sep = Rational(1) - hi_of(atlas.potential_values.back());
        Rational widest(0);
        for (std::size_t i = 0; i < atlas.potential_values.size(); ++i) {
            const auto& v = atlas.potential_values[i];
            if (!v.exact) widest = std::max(widest, v.width());
            if (i + 1 < atlas.potential_values.size())
                sep = std::min(sep, lo_of(atlas.potential_values[i + 1]) - hi_of(v));
        }
        if (sep <= widest * 16) fine = false;
        if (fine) {
            atlas.separation = sep;
            break;
        }
        b *= 2;
        for (std::size_t i = 1; i < atlas.potential_values.size(); ++i)
            atlas.potential_values[i] = refine_root(atlas.product, atlas.potential_values[i], b);
    }
    if (atlas.separation <= 0) throw InvariantViolation("potential transition values are not separated");
    Polynomial check = atlas.product * Polynomial({Rational(0), Rational(1)}) * Polynomial({Rational(1), Rational(-1)});
    atlas.mahler = min_separation(check);
    if (!atlas.mahler.holds) throw InvariantViolation("observed root separation is below the Mahler bound");
    return atlas;
}

TransitionAtlas build_atlas(const std::vector<std::pair<std::string, CoinAutomaton<Rational>>>& family,
                            unsigned bits) {
    std::vector<std::pair<std::string, RationalFunction>> fns;
    for (const auto& [label, m] : family) {
        try {
            fns.emplace_back(label, fit_rational(m).fn);
        } catch (const std::exception& e) {
            throw InvariantViolation("fit failed for '" + label + "': " + e.what());
        }
    }
    return build_atlas(fns, bits);
}

AdviceRecord advice_from_count(const TransitionAtlas& atlas, std::size_t w) {
    if (w == 0 || w > atlas.potential_values.size()) throw InvalidInput("advice count out of range");
    AdviceRecord rec;
    rec.w = w;
    rec.h = bits_below(atlas.separation) + 8;
    rec.p0 = atlas.potential_values[w - 1];
    if (!rec.p0.exact) rec.p0 = refine_root(atlas.product, rec.p0, rec.h + 2);
    const Rational hi = rec.p0.exact ? *rec.p0.exact : rec.p0.hi;
    const Rational lo = rec.p0.exact ? *rec.p0.exact : rec.p0.lo;
    const Integer scale = Integer(1) << rec.h;
    Rational target = (hi + atlas.separation / 4) * Rational(scale);
    Integer up = mp::numerator(target) / mp::denominator(target);
    if (Rational(up) != target) up += 1;
    rec.r = Rational(up, scale);
    rec.epsilon_lower = rec.r - hi;
    rec.epsilon_upper = rec.r - lo;
    // (p0, r] must hold no other value, and r < 1.
    if (!(rec.r < 1)) throw InvariantViolation("rounded bias reached 1");
    if (w < atlas.potential_values.size()) {
        const auto& next = atlas.potential_values[w];
        Rational next_lo = next.exact ? *next.exact : next.lo;
        if (!(rec.r < next_lo)) throw InvariantViolation("rounded bias passed the next potential value");
    }
    if (!(rec.epsilon_lower > 0)) throw InvariantViolation("rounded bias does not exceed p0");
    return rec;
}

namespace {

bool at_or_below(const Polynomial& q, RootInterval v, const Rational& x) {
    if (v.exact) return *v.exact <= x;
    if (q.sign_at(x) == 0 && v.lo < x && x < v.hi) return true;
    unsigned bits = 64;
    while (v.lo < x && x < v.hi) {
        bits *= 2;
        v = refine_root(q, v, bits);
        if (v.exact) return *v.exact <= x;
    }
    return v.hi <= x;
}

}  // namespace

AdviceRecord build_advice(const TransitionAtlas& atlas, const Rational& p_star) {
    if (!(p_star > 0 && p_star < 1)) throw InvalidInput("p* must lie in (0, 1)");
    std::size_t w = 0;
    for (const auto& v : atlas.potential_values)
        if (at_or_below(atlas.product, v, p_star)) ++w;
    AdviceRecord rec = advice_from_count(atlas, w);
    AdviceRecord replay = advice_from_count(atlas, rec.w);
    for (unsigned j = 1; j <= rec.h + 8; ++j)
        if (expansion_bit(replay.r, j) != expansion_bit(rec.r, j))
            throw InvariantViolation("advice replay disagrees at bit " + std::to_string(j));
    return rec;
}

}  // namespace coinlab
