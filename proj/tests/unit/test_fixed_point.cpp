#include "coinlab/constructions.hpp"
#include "coinlab/errors.hpp"

#include "../support/channels.hpp"

#include <doctest.h>

#include <cmath>

using namespace coinlab;
using testsupport::gamblers_ruin;

namespace {

template <class F>
Matrix<F> columns(const std::vector<Vector<F>>& vs, std::size_t n) {
    Matrix<F> m(n, vs.size());
    for (std::size_t j = 0; j < vs.size(); ++j)
        for (std::size_t i = 0; i < n; ++i) m(i, j) = vs[j][i];
    return m;
}

// Spectral projector onto the eigenvalue-1 space of a power-bounded B:
// V (W^T V)^-1 W^T with V, W right and left eigenvectors.
Matrix<Rational> spectral_projector(const Matrix<Rational>& b) {
    const std::size_t n = b.rows();
    Matrix<Rational> shifted = b - Matrix<Rational>::identity(n);
    auto right = nullspace(shifted, Rational(0));
    auto left = nullspace(shifted.transpose(), Rational(0));
    REQUIRE(right.size() == left.size());
    Matrix<Rational> v = columns(right, n), w = columns(left, n);
    return v * inverse(w.transpose() * v) * w.transpose();
}

double max_diff(const Matrix<Real>& a, const Matrix<Real>& b) {
    return std::sqrt(to_double(max_abs2(a - b)));
}

// A dead vector supported only on `allowed`.
bool supported_on(const Vector<Rational>& v, std::initializer_list<std::size_t> allowed) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        bool ok = false;
        for (std::size_t j : allowed) ok = ok || i == j;
        if (!ok && !v[i].is_zero()) return false;
    }
    return true;
}

CoinAutomaton<Rational> as_limit_mode(const CoinAutomaton<Rational>& m, std::vector<std::size_t> set) {
    return CoinAutomaton<Rational>(m.e0(), m.e1(), m.initial(), m.accept_index(), m.reject_index(), AcceptMode::limit,
                                   std::move(set));
}

}  // namespace

TEST_SUITE("fixed_point") {
    TEST_CASE("lambda_z trivial cases") {
        Matrix<Rational> id = Matrix<Rational>::identity(4);
        CHECK(lambda_z(id, Rational(1, 7)) == id);
        CHECK(lambda_z(Matrix<Rational>(4, 4), Rational(1, 7)) == id * Complex<Rational>(Rational(1, 7)));
        CHECK(lambda_limit(id).lambda == id);
    }

    TEST_CASE("lambda_z matches the truncated series") {
        PrecisionScope scope(96);
        Rng rng(21);
        const Real z = Real(1) / 1000;
        const std::size_t terms = 20000;
        for (int rep = 0; rep < 3; ++rep) {
            auto b = convert_matrix<Real>(superop_matrix(testsupport::random_channel(rng, 2)));
            // sum_{t < T} z (1-z)^t B^t, accumulated on the identity columns
            Matrix<Real> power = Matrix<Real>::identity(4), sum(4, 4);
            Real weight = z;
            for (std::size_t t = 0; t < terms; ++t) {
                sum += power * Complex<Real>(weight);
                power = b * power;
                weight *= 1 - z;
            }
            double bound = 2 * std::pow(1 - 1e-3, static_cast<double>(terms)) + 1e-20;
            CHECK(max_diff(lambda_z(b, z), sum) <= bound);
        }
    }

    TEST_CASE("exact limit equals the spectral projector on random channels") {
        Rng rng(31);
        for (int rep = 0; rep < 8; ++rep) {
            std::size_t n = 2 + rep % 2;
            auto b = superop_matrix(testsupport::random_channel(rng, n));
            auto fp = lambda_limit(b);
            CHECK(fp.provenance == Provenance::exact_lhopital);
            CHECK(fp.lambda == spectral_projector(b));
            CHECK(b * fp.lambda == fp.lambda);
            CHECK(fp.lambda * fp.lambda == fp.lambda);
        }
    }

    TEST_CASE("float limit agrees with the exact one") {
        PrecisionScope scope(128);
        Rng rng(8);
        for (int rep = 0; rep < 4; ++rep) {
            auto b = superop_matrix(testsupport::random_channel(rng, 2 + rep % 2));
            auto exact = lambda_limit(b);
            auto approx = lambda_limit(convert_matrix<Real>(b));
            CHECK(approx.provenance == Provenance::z_extrapolation);
            CHECK(max_diff(approx.lambda, convert_matrix<Real>(exact.lambda)) < 1e-20);
            CHECK(approx.fixed_point_residual < 1e-20);
            CHECK(approx.idempotence_residual < 1e-20);
            CHECK(approx.max_entry <= 1 + 1e-20);
        }
    }

    TEST_CASE("gallery automata: exact and float modes agree within 1e-9") {
        PrecisionScope scope(128);
        std::vector<CoinAutomaton<Rational>> gallery{first_heads(), single_flip(), identity_automaton(),
                                                     hc_walk(Rational(1, 2), Rational(1, 10), 2),
                                                     zero_vs_eps(Rational(1, 10)), amplified(single_flip(), 3)};
        for (const auto& m : gallery) {
            for (Rational p : {Rational(1, 3), Rational(7, 10)}) {
                auto red = reduce(m);
                auto exact = lambda_limit(red.at(p));
                auto approx = lambda_limit(convert_matrix<Real>(red.at(p)));
                CHECK(max_diff(approx.lambda, convert_matrix<Real>(exact.lambda)) < 1e-9);
                Real a = limiting_accept(convert_automaton<Real>(m), from_rational<Real>(p));
                CHECK(std::abs(to_double(a) - to_double(limiting_accept(m, p))) < 1e-9);
            }
        }
    }

    TEST_CASE("limiting_accept examples") {
        CHECK(limiting_accept(single_flip(), Rational(3, 10)) == Rational(3, 10));
        CHECK(limiting_accept(first_heads(), Rational(3, 10)) == 1);
        CHECK(limiting_accept(first_heads(), Rational(0)) == 0);
        CHECK(limiting_accept(identity_automaton(), Rational(1, 2)) == 0);
        CHECK(limiting_reject(single_flip(), Rational(3, 10)) == Rational(7, 10));
        auto hc = hc_walk(Rational(1, 2), Rational(1, 10), 2);
        CHECK(limiting_accept(hc, Rational(3, 5)) == Rational(9, 13));
    }

    TEST_CASE("HC walk matches gambler's ruin") {
        for (unsigned k : {1u, 2u, 4u}) {
            for (Rational p : {Rational(1, 2), Rational(2, 5)}) {
                auto hc = hc_walk(p, Rational(1, 10), k);
                for (Rational q : {Rational(1, 5), Rational(1, 2), Rational(3, 5), Rational(9, 10)}) {
                    Rational expect = gamblers_ruin(q * (1 - p), (1 - q) * p, k);
                    CHECK(limiting_accept(hc, q) == expect);
                    CHECK(limiting_accept(hc, q) + limiting_reject(hc, q) == 1);
                }
            }
        }
    }

    TEST_CASE("limit dominates every finite-time value") {
        auto hc = hc_walk(Rational(1, 2), Rational(1, 10), 3);
        Rational a = limiting_accept(hc, Rational(3, 5));
        auto curve = accept_curve(hc, Rational(3, 5), 300);
        for (const auto& at : curve) CHECK(at <= a);
        CHECK(a - curve.back() < Rational(1, 1000000));
    }

    TEST_CASE("cesaro_accept examples") {
        CHECK(cesaro_accept(identity_automaton(AcceptMode::limit), Rational(1, 2)) == 1);
        CHECK(cesaro_accept(two_cycle(), Rational(1, 3)) == Rational(1, 2));
        CHECK(cesaro_average(two_cycle(), Rational(1, 3), 1000) == Rational(1, 2));
        auto hc = hc_walk(Rational(1, 2), Rational(1, 10), 2);
        auto lim = as_limit_mode(hc, {hc.accept_index()});
        CHECK(cesaro_accept(lim, Rational(3, 5)) == limiting_accept(hc, Rational(3, 5)));
        CHECK_THROWS_AS(cesaro_accept(hc, Rational(1, 2)), InvalidInput);
    }

    TEST_CASE("dead subspace examples") {
        // first_heads has no reject state and every state can still accept
        CHECK(dead_subspace(first_heads()).dead_basis.empty());

        auto id = dead_subspace(identity_automaton());
        REQUIRE(id.dead_basis.size() == 1);
        CHECK(supported_on(id.dead_basis[0], {0}));

        const unsigned k = 2;
        auto hc = hc_walk(Rational(1, 2), Rational(1, 10), k);
        for (Rational p : {Rational(1, 2), Rational(1, 4)}) {
            auto sub = dead_subspace(hc, p);
            REQUIRE(sub.dead_basis.size() == 2);
            // -K and Reject: the only states from which Accept is unreachable
            for (const auto& v : sub.dead_basis) CHECK(supported_on(v, {0, 2 * k + 2}));
            CHECK(sub.dead_projector(0, 0) == Complex<Rational>(1));
            CHECK(sub.dead_projector(2 * k + 2, 2 * k + 2) == Complex<Rational>(1));
            CHECK(sub.live_projector(2 * k + 1, 2 * k + 1).is_zero());
            CHECK(sub.live_projector(1, 1) == Complex<Rational>(1));
        }
    }

    TEST_CASE("live_prob examples") {
        auto id = identity_automaton();
        auto id_sub = dead_subspace(id);
        for (std::size_t t : {0u, 3u, 50u}) CHECK(live_prob(id, id_sub, Rational(1, 2), t) == 0);

        auto sf = single_flip();
        auto sf_sub = dead_subspace(sf);
        CHECK(live_prob(sf, sf_sub, Rational(1, 3), 0) == 1);
        for (std::size_t t : {1u, 4u}) CHECK(live_prob(sf, sf_sub, Rational(1, 3), t) == 0);

        auto hc = hc_walk(Rational(1, 2), Rational(1, 10), 2);
        auto sub = dead_subspace(hc);
        // live mass = everything except Accept, Reject and -K
        Matrix<Rational> b = superop_matrix(mix(Rational(3, 5), hc.e1(), hc.e0()));
        Vector<Rational> v = vectorize(hc.initial());
        for (int t = 0; t < 10; ++t) v = b * v;
        const std::size_t s = hc.dim();
        Rational dead_or_done = v[0].re + v[5 * s + 5].re + v[6 * s + 6].re;
        CHECK(live_prob(hc, sub, Rational(3, 5), 10) == 1 - dead_or_done);
    }

    TEST_CASE("sandwich a(p) <= a_t(p) + g_t(p)") {
        for (unsigned k : {2u, 3u}) {
            auto hc = hc_walk(Rational(1, 2), Rational(1, 10), k);
            auto sub = dead_subspace(hc);
            for (Rational p : {Rational(3, 10), Rational(1, 2), Rational(4, 5)}) {
                Rational a = limiting_accept(hc, p);
                auto at = accept_curve(hc, p, 200);
                auto gt = live_curve(hc, sub, p, 200);
                for (std::size_t t = 0; t <= 200; t += 7) CHECK(a <= at[t] + gt[t]);
                CHECK(gt[200] < gt[0]);
            }
        }
    }

    TEST_CASE("leaky subspace check") {
        auto hc = hc_walk(Rational(1, 2), Rational(1, 10), 2);
        auto v = leaky_check(hc, Rational(1, 2), 100, 17);
        REQUIRE(v);
        CHECK(*v > 1e-6);
        CHECK_FALSE(leaky_check(identity_automaton(), Rational(1, 2), 100, 17));
        auto sf = leaky_check(single_flip(), Rational(3, 10), 100, 17);
        REQUIRE(sf);
        CHECK(*sf >= 0.3 - 1e-12);
    }

    TEST_CASE("limit state reduction agrees with the full system") {
        auto hc = hc_walk(Rational(2, 5), Rational(1, 10), 2);
        auto red = reduce(hc);
        CHECK(red.coords.size() < hc.dim() * hc.dim());
        auto st = limit_state(hc, Rational(1, 2));
        auto full = lambda_limit(superop_matrix(mix(Rational(1, 2), hc.e1(), hc.e0()))).lambda *
                    vectorize(hc.initial());
        CHECK(st.state == full);
    }

    TEST_CASE("quantum distinguisher needs more bits than allowed") {
        QuantumParams q{Rational(1, 2), Rational(1, 100)};
        LimitOptions opts;
        opts.max_precision_bits = 64;
        PrecisionScope scope(64);
        bool thrown = false;
        try {
            limit_state(quantum_builder(q), Rational(51, 100), opts);
        } catch (const PrecisionError& e) {
            thrown = true;
            CHECK(e.achieved_error() > 0);
        }
        CHECK(thrown);
    }
}
