// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is 0 only when every criterion passes.

#include "coinlab/advice_coin.hpp"
#include "coinlab/constructions.hpp"
#include "coinlab/errors.hpp"
#include "coinlab/rational.hpp"

#include "../support/channels.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace coinlab;
using testsupport::gamblers_ruin;

namespace {

struct Log {
    std::ostringstream lines;
    bool ok = true;

    void info(const std::string& s) { lines << "    " << s << '\n'; }
    bool expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            lines << "    failed: " << what << '\n';
        }
        return cond;
    }
};

std::string fmt(double v, int digits = 6) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

Rational pow_int(Rational x, unsigned n) {
    Rational r(1);
    for (unsigned i = 0; i < n; ++i) r *= x;
    return r;
}

using Named = std::pair<std::string, CoinAutomaton<Rational>>;

// Rational-channel gallery, including limit-mode members.
std::vector<Named> rational_gallery() {
    return {{"first-heads", first_heads()},
            {"single-flip", single_flip()},
            {"identity", identity_automaton()},
            {"identity-limit", identity_automaton(AcceptMode::limit)},
            {"two-cycle", two_cycle()},
            {"hc-walk k=1", hc_walk(Rational(1, 2), Rational(1, 10), 1)},
            {"hc-walk k=2", hc_walk(Rational(1, 2), Rational(1, 10), 2)},
            {"hc-walk k=10", hc_walk(Rational(1, 2), Rational(1, 10), 10)},
            {"zero-vs-eps", zero_vs_eps(Rational(1, 10))},
            {"amplified single-flip x3", amplified(single_flip(), 3)}};
}

// 1. Quantum distinguisher gap at 192 bits.
void criterion_quantum(Log& log) {
    for (Rational eps : {Rational(1, 10), Rational(1, 20)}) {
        QuantumParams q{Rational(1, 2), eps};
        auto lo = quantum_limit(q, q.p, 192);
        auto hi = quantum_limit(q, q.p + eps, 192);
        double a_lo = to_double(lo.state[10].re), a_hi = to_double(hi.state[10].re);
        double err = std::max(lo.error, hi.error);
        log.info("eps=" + to_string(eps) + ": a(p)=" + fmt(a_lo, 8) + " a(p+eps)=" + fmt(a_hi, 8) +
                 " gap=" + fmt(a_hi - a_lo, 8) + " error=" + fmt(err, 3) + " bits=" + std::to_string(hi.precision_bits));
        log.expect(a_lo <= 0.0008, "a(p) <= 0.0008 at eps=" + to_string(eps));
        log.expect(a_hi >= 0.0125, "a(p+eps) >= 0.0125 at eps=" + to_string(eps));
        log.expect(a_hi - a_lo - 2 * err >= 0.0117, "gap >= 0.0117 at eps=" + to_string(eps));
        log.expect(err <= 1e-6, "uncertainty <= 1e-6 at eps=" + to_string(eps));
        log.expect(lo.precision_bits >= 192 && hi.precision_bits >= 192, "precision >= 192 bits");
    }
    // stretch target: reported, never fatal
    try {
        QuantumParams q{Rational(1, 2), Rational(1, 100)};
        auto lo = quantum_limit(q, q.p, 192);
        auto hi = quantum_limit(q, q.p + q.epsilon, 192);
        double a_lo = to_double(lo.state[10].re), a_hi = to_double(hi.state[10].re);
        log.info("eps=1/100 (stretch): a(p)=" + fmt(a_lo, 8) + " a(p+eps)=" + fmt(a_hi, 8) + " gap=" +
                 fmt(a_hi - a_lo, 8) + " bits=" + std::to_string(hi.precision_bits));
    } catch (const PrecisionError& e) {
        log.info(std::string("eps=1/100 (stretch) did not converge: ") + e.what());
    }
}

// 2. HC walk K=10, exact.
void criterion_hc(Log& log) {
    auto m = hc_walk(Rational(1, 2), Rational(1, 10), 10);
    Rational a5 = limiting_accept(m, Rational(1, 2)), a6 = limiting_accept(m, Rational(3, 5));
    Rational expect6 = 1 / (1 + pow_int(Rational(2, 3), 10));
    log.info("a(1/2)=" + to_string(a5) + " a(3/5)=" + to_string(a6) + " gap=" + fmt(to_double(a6 - a5), 8));
    log.expect(a5 == Rational(1, 2), "a(1/2) = 1/2");
    log.expect(a6 == expect6, "a(3/5) = 1/(1+(2/3)^10)");
    log.expect(a6 - a5 > Rational(12, 25), "gap > 0.48");
}

// 3. Rational fits of the gallery.
void criterion_fit(Log& log) {
    for (const auto& [name, m] : rational_gallery()) {
        if (m.dim() > 7) continue;
        auto fit = fit_rational(m);
        const int bound = static_cast<int>(m.dim() * m.dim());
        bool fresh = true;
        for (int j = 1; j <= 20; ++j) {
            Rational p(6 * j - 1, 127);
            Rational direct = m.mode() == AcceptMode::limit ? cesaro_accept(m, p) : limiting_accept(m, p);
            fresh = fresh && fit.fn(p) == direct;
        }
        std::size_t poles = count_roots(fit.fn.den, Rational(0), Rational(1));
        log.info(name + ": deg " + std::to_string(fit.fn.num.degree()) + "/" + std::to_string(fit.fn.den.degree()) +
                 " (bound " + std::to_string(bound) + "), fresh points " + (fresh ? "exact" : "MISMATCH") +
                 ", poles in (0,1): " + std::to_string(poles));
        log.expect(fit.fn.num.degree() <= bound && fit.fn.den.degree() <= bound, name + " degree bound");
        log.expect(fresh, name + " exact at 20 fresh points");
        log.expect(poles == 0, name + " pole free on (0,1)");
    }
}

// 4. Fixed-point invariants on random channels.
void criterion_fixed_point(Log& log) {
    PrecisionScope scope(128);
    Rng rng(2024);
    const std::vector<Rational> biases{Rational(0), Rational(1, 5), Rational(1, 2), Rational(5, 7), Rational(1)};
    double worst_fp = 0, worst_idem = 0, worst_entry = 0, worst_agree = 0;
    std::size_t exact_fail = 0, count = 0;
    for (int c = 0; c < 50; ++c) {
        std::size_t n = 2 + static_cast<std::size_t>(c % 3);
        auto e0 = testsupport::random_channel(rng, n), e1 = testsupport::random_channel(rng, n);
        for (const auto& p : biases) {
            auto b = superop_matrix(mix(p, e1, e0));
            auto exact = lambda_limit(b);
            if (!(b * exact.lambda == exact.lambda) || !(exact.lambda * exact.lambda == exact.lambda)) ++exact_fail;
            auto approx = lambda_limit(convert_matrix<Real>(b));
            double agree = std::sqrt(to_double(max_abs2(approx.lambda - convert_matrix<Real>(exact.lambda))));
            worst_fp = std::max(worst_fp, approx.fixed_point_residual);
            worst_idem = std::max(worst_idem, approx.idempotence_residual);
            worst_entry = std::max({worst_entry, approx.max_entry, exact.max_entry});
            worst_agree = std::max(worst_agree, agree);
            ++count;
        }
    }
    log.info(std::to_string(count) + " instances: max |B L - L| = " + fmt(worst_fp, 3) + ", max |L^2 - L| = " +
             fmt(worst_idem, 3) + ", max entry = " + fmt(worst_entry, 12) + ", exact vs float = " + fmt(worst_agree, 3));
    log.expect(exact_fail == 0, "exact fixed point and idempotence");
    log.expect(worst_fp <= 1e-10, "fixed-point residual <= 1e-10");
    log.expect(worst_idem <= 1e-10, "idempotence residual <= 1e-10");
    log.expect(worst_entry <= 1 + 1e-10, "entries <= 1 + 1e-10");
    log.expect(worst_agree <= 1e-9, "exact and extrapolated agree within 1e-9");
}

// 5. Monotonicity in t and the live-mass sandwich.
void criterion_sandwich(Log& log) {
    const std::size_t horizon = 200;
    const std::vector<Rational> grid{Rational(0), Rational(1, 10), Rational(1, 4), Rational(1, 2),
                                     Rational(3, 5), Rational(3, 4), Rational(1)};
    std::size_t checked = 0;
    for (const auto& [name, m] : rational_gallery()) {
        std::optional<SubspaceReport<Rational>> sub;
        if (m.mode() != AcceptMode::limit) sub = dead_subspace(m);
        for (const auto& p : grid) {
            auto at = accept_curve(m, p, horizon);
            bool mono = true;
            for (std::size_t t = 1; t <= horizon; ++t) mono = mono && at[t - 1] <= at[t];
            log.expect(mono, name + " a_t nondecreasing at p=" + to_string(p));
            if (sub) {
                Rational a = limiting_accept(m, p);
                auto gt = live_curve(m, *sub, p, horizon);
                bool sand = true;
                for (std::size_t t = 0; t <= horizon; ++t) sand = sand && a <= at[t] + gt[t];
                log.expect(sand, name + " sandwich at p=" + to_string(p));
            }
            ++checked;
        }
    }
    // time-dependent member up to its horizon
    auto roh = run_of_heads(Rational(1, 4));
    for (const auto& p : grid) {
        Rational prev(0);
        bool mono = true;
        for (std::size_t t = 0; t <= roh.horizon; ++t) {
            Rational cur = accept_prob_at(roh, p, t);
            mono = mono && prev <= cur;
            prev = cur;
        }
        log.expect(mono, "run-of-heads a_t nondecreasing at p=" + to_string(p));
        ++checked;
    }
    // quantum member at working precision
    {
        PrecisionScope scope(192);
        QuantumParams q{Rational(1, 2), Rational(1, 10)};
        auto m = quantum_distinguisher(q);
        auto sub = dead_subspace(m);
        for (Rational p : {Rational(1, 2), Rational(3, 5)}) {
            Real pr = from_rational<Real>(p);
            auto at = accept_curve(m, pr, horizon);
            auto gt = live_curve(m, sub, pr, horizon);
            Real a = quantum_limit(q, p, 192).state[10].re;
            bool mono = true, sand = true;
            for (std::size_t t = 0; t <= horizon; ++t) {
                if (t) mono = mono && at[t - 1] <= at[t] + Real(1e-40);
                sand = sand && to_double(a - at[t] - gt[t]) <= 1e-10;
            }
            log.expect(mono, "quantum a_t nondecreasing at p=" + to_string(p));
            log.expect(sand, "quantum sandwich at p=" + to_string(p));
            ++checked;
        }
    }
    log.info(std::to_string(checked) + " (automaton, bias) pairs, t <= " + std::to_string(horizon));
}

// 6. Atlas and advice on an HC family at p* = 1/2.
void criterion_advice(Log& log) {
    const Rational ps(1, 2);
    std::vector<Named> family;
    for (Rational p : {Rational(2, 5), Rational(7, 20), Rational(3, 5), Rational(13, 20)})
        family.push_back({"hc p=" + to_string(p) + " k=2", hc_walk(p, Rational(1, 10), 2)});
    auto atlas = build_atlas(family);
    auto adv = build_advice(atlas, ps);
    log.info(std::to_string(atlas.potential_values.size()) + " potential values, separation " +
             fmt(to_double(atlas.separation), 6) + ", w=" + std::to_string(adv.w) + ", r=" + to_string(adv.r) +
             ", h=" + std::to_string(adv.h));
    for (const auto& [name, m] : family) {
        Rational at_star = limiting_accept(m, ps), at_r = limiting_accept(m, adv.r);
        log.info(name + ": a(p*)=" + fmt(to_double(at_star)) + " a(r)=" + fmt(to_double(at_r)));
        if (at_star >= Rational(2, 3))
            log.expect(at_r >= Rational(3, 5), name + " keeps a(r) >= 3/5");
        else if (at_star <= Rational(1, 3))
            log.expect(at_r <= Rational(2, 5), name + " keeps a(r) <= 2/5");
        else
            log.expect(false, name + " decides at p*");
    }
    bool zero_tail = mp::denominator(adv.r * Rational(Integer(1) << adv.h)) == 1;
    for (unsigned j = adv.h + 1; j <= adv.h + 64; ++j) zero_tail = zero_tail && expansion_bit(adv.r, j) == 0;
    log.expect(zero_tail, "expansion of r is zero beyond h");
    const auto& s = atlas.mahler;
    log.info("observed separation " + fmt(to_double(s.observed)) + " (certified " + fmt(to_double(s.observed_lower)) +
             ") vs Mahler bound " + fmt(to_double(s.mahler_bound), 4));
    log.expect(s.holds && s.observed_lower >= s.mahler_bound, "observed separation >= Mahler bound");
    bool clear = true;
    for (const auto& v : atlas.potential_values) clear = clear && !(v.lo > adv.p0.hi && v.lo <= adv.r);
    log.expect(clear, "no potential value in (p0, r]");
}

// 7. Codec, expansion sampler and von Neumann.
void criterion_codec(Log& log) {
    for (unsigned s : {3u, 5u, 8u}) {
        int ok = 0;
        for (std::uint64_t seed = 1; seed <= 200; ++seed) {
            Rng pick(seed, 1000 + s);
            std::string bits;
            for (unsigned i = 0; i < s; ++i) bits += static_cast<char>('0' + pick.next() % 2);
            ok += roundtrip(bits, seed).success;
        }
        log.info("s=" + std::to_string(s) + ": " + std::to_string(ok) + "/200 recovered with " +
                 std::to_string(default_trials(s)) + " trials");
        log.expect(ok >= 198, "success rate >= 0.99 at s=" + std::to_string(s));
    }
    std::size_t oracles = 0;
    bool exact = true;
    for (unsigned h = 1; h <= 12; ++h) {
        for (std::uint64_t k = 1; k < (1ull << h); k += 2) {
            Rational r(Integer(k), Integer(1) << h);
            auto o = ExpansionOracle::from_dyadic(r);
            std::uint64_t ones = 0;
            for (std::uint64_t z = 0; z < (1ull << h); ++z) {
                unsigned pos = 0;
                CoinSource prefix = [&]() { return static_cast<int>((z >> (h - 1 - pos++)) & 1); };
                ones += biased_bit(o, prefix);
            }
            exact = exact && Rational(Integer(ones), Integer(1) << h) == r;
            ++oracles;
        }
    }
    log.info(std::to_string(oracles) + " dyadic oracles with h <= 12 enumerated");
    log.expect(exact, "biased_bit probability equals r");
    bool fair = true;
    for (Rational p : {Rational(1, 10), Rational(1, 3), Rational(9, 10)}) {
        Rational one(0), zero(0);
        for (int a : {0, 1})
            for (int b : {0, 1}) {
                int step = 0;
                CoinSource pair = [&]() { return step++ == 0 ? a : b; };
                auto res = von_neumann(pair, 1);
                Rational w = (a ? p : 1 - p) * (b ? p : 1 - p);
                if (res.bit) (*res.bit ? one : zero) += w;
            }
        fair = fair && one == zero && one == p * (1 - p);
    }
    log.expect(fair, "von Neumann output is fair given emission");
}

// 8. Closed forms of run-of-heads and zero-vs-eps.
void criterion_closed_forms(Log& log) {
    auto roh = run_of_heads(Rational(1, 4));
    for (Rational q : {Rational(1, 2), Rational(3, 4)}) {
        Rational got = accept_prob_at(roh, q, roh.horizon);
        Rational closed = 1 - pow_int(1 - pow_int(q, 4), 16);
        log.info("run-of-heads q=" + to_string(q) + ": " + fmt(to_double(got), 12));
        log.expect(std::abs(to_double(got - closed)) <= 1e-12, "run-of-heads closed form at q=" + to_string(q));
    }
    const Rational eps(1, 10);
    auto z = zero_vs_eps(eps);
    for (Rational q : {Rational(0), Rational(1, 10), Rational(1)}) {
        Rational got = limiting_accept(z, q);
        Rational closed = (1 - eps) * q / (eps + (1 - eps) * q);
        log.info("zero-vs-eps q=" + to_string(q) + ": " + to_string(got));
        log.expect(std::abs(to_double(got - closed)) <= 1e-12, "zero-vs-eps closed form at q=" + to_string(q));
    }
}

// 9. Monte Carlo against the exact values above.
void criterion_monte_carlo(Log& log) {
    const std::size_t trials = 100000;
    std::uint64_t seed = 900;
    double worst = 0;
    auto check = [&](const std::string& label, const Sampler& s, const Rational& p, const Rational& exact,
                     std::size_t cutoff) {
        auto sum = monte_carlo(s, to_double(p), cutoff, trials, seed++);
        double a = to_double(exact);
        if (a == 0 || a == 1) {
            log.expect(sum.accept_rate() == a, label + " deterministic outcome");
            return;
        }
        double se = std::sqrt(a * (1 - a) / trials);
        double z = (sum.accept_rate() - a) / se;
        worst = std::max(worst, std::abs(z));
        log.expect(std::abs(z) <= 4, label + " within 4 SE (z=" + fmt(z, 3) + ")");
    };
    auto hc = hc_walk(Rational(1, 2), Rational(1, 10), 10);
    Sampler hcs(hc);
    check("hc k=10 q=1/2", hcs, Rational(1, 2), Rational(1, 2), kDefaultCutoff);
    check("hc k=10 q=3/5", hcs, Rational(3, 5), Rational(59049, 60073), kDefaultCutoff);

    std::vector<Named> family;
    for (Rational p : {Rational(2, 5), Rational(7, 20), Rational(3, 5), Rational(13, 20)})
        family.push_back({"hc p=" + to_string(p), hc_walk(p, Rational(1, 10), 2)});
    auto adv = build_advice(build_atlas(family), Rational(1, 2));
    for (const auto& [name, m] : family) {
        Sampler s(m);
        check(name + " at p*", s, Rational(1, 2), limiting_accept(m, Rational(1, 2)), kDefaultCutoff);
        check(name + " at r", s, adv.r, limiting_accept(m, adv.r), kDefaultCutoff);
    }

    auto roh = run_of_heads(Rational(1, 4));
    Sampler rs(roh);
    for (Rational q : {Rational(1, 2), Rational(3, 4)})
        check("run-of-heads q=" + to_string(q), rs, q, accept_prob_at(roh, q, roh.horizon), roh.horizon);

    auto z = zero_vs_eps(Rational(1, 10));
    Sampler zs(z);
    for (Rational q : {Rational(0), Rational(1, 10), Rational(1)})
        check("zero-vs-eps q=" + to_string(q), zs, q, limiting_accept(z, q), kDefaultCutoff);

    Sampler sf(single_flip());
    check("single-flip q=3/10", sf, Rational(3, 10), Rational(3, 10), kDefaultCutoff);
    log.info(std::to_string(seed - 900) + " simulations of " + std::to_string(trials) + " trials, max |z| = " +
             fmt(worst, 3));
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Log&)>>> criteria{
        {"quantum distinguisher gap at >= 192 bits", criterion_quantum},
        {"HC walk K=10 exact values", criterion_hc},
        {"rational representation of gallery acceptance", criterion_fit},
        {"fixed-point invariants on 50 random channels x 5 biases", criterion_fixed_point},
        {"monotonicity and sandwich, t <= 200", criterion_sandwich},
        {"atlas and advice on an HC family at p* = 1/2", criterion_advice},
        {"bias codec, expansion sampler, von Neumann", criterion_codec},
        {"run-of-heads and zero-vs-eps closed forms", criterion_closed_forms},
        {"Monte Carlo consistency, 1e5 trials", criterion_monte_carlo},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Log log;
        auto start = std::chrono::steady_clock::now();
        try {
            criteria[i].second(log);
        } catch (const std::exception& e) {
            log.expect(false, std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (log.ok ? "PASS" : "FAIL") << ' ' << i + 1 << ": " << criteria[i].first << " (" << fmt(secs, 3)
                  << " s)\n"
                  << log.lines.str() << std::flush;
        failures += !log.ok;
    }
    return failures == 0 ? 0 : 1;
}
