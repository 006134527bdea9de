#include "coinlab/cli.hpp"
#include "coinlab/errors.hpp"
#include "coinlab/io.hpp"
#include "coinlab/report.hpp"

#include "../support/channels.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace coinlab;

namespace {

struct CliRun {
    int code;
    std::string out;
    std::string err;
    Json json() const { return Json::parse(out); }
};

CliRun cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "coinlab_unit";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void check_same(const CoinAutomaton<Rational>& a, const CoinAutomaton<Rational>& b) {
    CHECK(a.dim() == b.dim());
    CHECK(superop_matrix(a.e0()) == superop_matrix(b.e0()));
    CHECK(superop_matrix(a.e1()) == superop_matrix(b.e1()));
    CHECK(a.initial() == b.initial());
    CHECK(a.accept_index() == b.accept_index());
    CHECK(a.reject_index() == b.reject_index());
    CHECK(a.mode() == b.mode());
    CHECK(a.accepting_set() == b.accepting_set());
}

}  // namespace

TEST_SUITE("io") {
    TEST_CASE("scalars") {
        CHECK(rational_from_json(Json("3/4")) == Rational(3, 4));
        CHECK(rational_from_json(Json("0.6")) == Rational(3, 5));
        CHECK(rational_from_json(Json(3)) == Rational(3));
        CHECK(rational_from_json(Json(0.5)) == Rational(1, 2));
        CHECK(rational_to_json(Rational(-6, 8)) == Json("-3/4"));
        CHECK_THROWS_AS(rational_from_json(Json::array()), InvalidInput);
        CHECK_THROWS_AS(rational_from_json(Json("x")), InvalidInput);
    }

    TEST_CASE("gallery automata round-trip through JSON") {
        std::vector<CoinAutomaton<Rational>> gallery{first_heads(), single_flip(), identity_automaton(AcceptMode::limit),
                                                     two_cycle(), hc_walk(Rational(1, 2), Rational(1, 10), 3),
                                                     zero_vs_eps(Rational(1, 10)), amplified(single_flip(), 3)};
        for (const auto& m : gallery) {
            Json j = automaton_to_json(m);
            auto back = automaton_from_json(Json::parse(j.dump()));
            check_same(m, back);
        }
    }

    TEST_CASE("random quantum channels round-trip exactly") {
        Rng rng(77);
        for (int rep = 0; rep < 5; ++rep) {
            std::size_t n = 3;
            // the random channel acts off Accept; Accept itself is left alone
            auto make = [&] {
                auto e = testsupport::random_channel(rng, n);
                Matrix<Rational> off = Matrix<Rational>::identity(n) - Matrix<Rational>::unit(n, 2, 2);
                std::vector<KrausTerm<Rational>> terms;
                for (const auto& t : e.terms()) terms.push_back({t.weight, t.op * off});
                terms.push_back({Rational(1), Matrix<Rational>::unit(n, 2, 2)});
                return with_accept_measurement(Superoperator<Rational>(n, std::move(terms)), 2);
            };
            CoinAutomaton<Rational> m(make(), make(), DensityMatrix<Rational>::basis_state(n, 0), 2, std::nullopt,
                                      AcceptMode::one_sided);
            auto back = automaton_from_json(Json::parse(automaton_to_json(m).dump()));
            check_same(m, back);
            CHECK(limiting_accept(back, Rational(1, 3)) == limiting_accept(m, Rational(1, 3)));
        }
    }

    TEST_CASE("malformed automata are rejected") {
        Json j = automaton_to_json(single_flip());
        Json missing = j;
        missing.erase("e1");
        CHECK_THROWS_AS(automaton_from_json(missing), InvalidInput);
        Json bad_accept = j;
        bad_accept["accept"] = 7;
        CHECK_THROWS_AS(automaton_from_json(bad_accept), InvalidInput);
        Json not_tp = j;
        not_tp["e0"]["kraus"][0][0][0] = Json::array({"2", "0"});
        CHECK_THROWS_AS(automaton_from_json(not_tp), InvalidInput);
        Json bad_mode = j;
        bad_mode["mode"] = "eventually";
        CHECK_THROWS_AS(automaton_from_json(bad_mode), InvalidInput);
    }

    TEST_CASE("polynomials, atlas and advice") {
        Polynomial p({Rational(15), Rational(-64), Rational(64)});
        CHECK(polynomial_from_json(polynomial_to_json(p)) == p);
        CHECK(polynomial_from_json(Json::array({1, "1/2", 0})) == Polynomial({Rational(1), Rational(1, 2)}));

        auto atlas = build_atlas({{"single-flip", single_flip()}});
        Json a = atlas_to_json(atlas);
        CHECK(a["potential_values"] == Json::array({"0", "2/5", "3/5"}));
        CHECK(a["separation"] == "1/5");
        CHECK(a["mahler"]["holds"] == true);
        auto adv = build_advice(atlas, Rational(1, 2));
        Json v = advice_to_json(adv);
        CHECK(v["w"] == 2);
        CHECK(rational_from_json(v["r"]) == adv.r);
        CHECK(v["h"] == adv.h);
    }

    TEST_CASE("report helpers") {
        CHECK(fnv1a_hex("") == "cbf29ce484222325");
        CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
        std::string csv = csv_table("p", {{"a", {0, 0.5}, {0, 1}}, {"b", {0, 0.5}, {1, 2}}});
        CHECK(csv.rfind("p,a,b\n", 0) == 0);
        CHECK(csv.find("0.5,1,2") != std::string::npos);
        std::string svg = svg_plot("t", "x", "y", {{"a", {0, 1}, {0, 1}}});
        CHECK(svg.rfind("<svg", 0) == 0);
        CHECK(svg.find("</svg>") != std::string::npos);
        CHECK_THROWS_AS(write_file("/nonexistent-dir/x.txt", "x"), InvalidInput);
    }
}

TEST_SUITE("cli") {
    TEST_CASE("limit on first-heads") {
        auto r = cli({"limit", "--gallery", "first-heads", "--p", "3/10"});
        REQUIRE(r.code == kExitOk);
        auto j = r.json();
        CHECK(j["a"] == "1");
        CHECK(j["command"] == "limit");
        CHECK(j["version"] == kVersion);
        CHECK(j["seed"] == 1);
        CHECK(j.contains("config_hash"));
        CHECK(j.contains("precision_bits"));
    }

    TEST_CASE("atlas on single-flip") {
        auto r = cli({"atlas", "--gallery", "single-flip"});
        REQUIRE(r.code == kExitOk);
        CHECK(r.json()["potential_values"] == Json::array({"0", "2/5", "3/5"}));
    }

    TEST_CASE("advice roundtrip and encode") {
        auto r = cli({"advice", "roundtrip", "--bits", "10110101", "--repeat", "3"});
        REQUIRE(r.code == kExitOk);
        auto j = r.json();
        CHECK(j["success"] == true);
        CHECK(j["bias"] == "181/256");
        CHECK(j["recovered"] == "10110101");
        auto e = cli({"advice", "encode", "--bits", "101"}).json();
        CHECK(e["bias"] == "5/8");
        CHECK(e["trials"] == 4096);
    }

    TEST_CASE("gap reports") {
        auto hc = cli({"--trials", "2000", "gap", "--gallery", "hc-walk:p=1/2,eps=1/10,k=10", "--p", "1/2", "--eps", "1/10"});
        REQUIRE(hc.code == kExitOk);
        auto j = hc.json();
        CHECK(j["gap"] == "58025/120146");
        CHECK(j["high"]["a"] == "59049/60073");
        CHECK(std::abs(j["monte_carlo"]["high"]["z_score"].get<double>()) <= 4);

        auto same = cli({"--trials", "100", "gap", "--gallery", "single-flip", "--p", "1/3", "--eps", "0"});
        REQUIRE(same.code == kExitOk);
        CHECK(same.json()["gap"] == "0");

        auto q = cli({"--precision-bits", "192", "gap", "--gallery", "quantum", "--p", "1/2", "--eps", "1/10"});
        REQUIRE(q.code == kExitOk);
        auto qj = q.json();
        CHECK(qj["gap_lower"].get<double>() >= 0.0117);
        CHECK(qj["precision_bits"] == 192);
    }

    TEST_CASE("identical configuration gives identical bytes") {
        std::vector<std::string> args{"--seed", "9", "--trials", "500", "simulate", "--gallery", "hc-walk:k=3", "--p", "0.6"};
        auto a = cli(args), b = cli(args);
        REQUIRE(a.code == kExitOk);
        CHECK(a.out == b.out);
        args[1] = "10";
        auto c = cli(args);
        CHECK(c.json()["config_hash"] != a.json()["config_hash"]);
        CHECK(c.json()["seed"] == 10);
    }

    TEST_CASE("roots") {
        auto r = cli({"roots", "--poly", "[15,-64,64]"});
        REQUIRE(r.code == kExitOk);
        auto j = r.json();
        CHECK(j["count"] == 2);
        CHECK(j["roots"][0]["exact"] == "3/8");
        CHECK(j["roots"][1]["exact"] == "5/8");
        CHECK(j["separation"]["observed"] == "1/4");
    }

    TEST_CASE("gallery JSON feeds back through --file") {
        auto g = cli({"gallery", "zero-vs-eps:eps=1/10"});
        REQUIRE(g.code == kExitOk);
        auto path = scratch("zve.json");
        {
            std::ofstream f(path);
            f << g.json()["automaton"].dump();
        }
        auto r = cli({"limit", "--file", path.string(), "--p", "1/10"});
        REQUIRE(r.code == kExitOk);
        CHECK(r.json()["a"] == "9/19");
        auto listed = cli({"gallery", "--list"}).json()["gallery"];
        CHECK(listed.size() == gallery_names().size());
    }

    TEST_CASE("output files") {
        auto out = scratch("limit.json"), csv = scratch("curve.csv"), svg = scratch("curve.svg");
        auto r = cli({"--out", out.string(), "--csv", csv.string(), "--svg", svg.string(), "limit", "--gallery",
                      "single-flip", "--grid", "10"});
        REQUIRE(r.code == kExitOk);
        CHECK(r.out.empty());
        CHECK(Json::parse(slurp(out))["command"] == "limit");
        std::string table = slurp(csv);
        CHECK(table.find("\n0.3,0.3\n") != std::string::npos);
        CHECK(slurp(svg).find("<svg") != std::string::npos);
    }

    TEST_CASE("exit codes") {
        CHECK(cli({"limit", "--gallery", "no-such-thing"}).code == kExitBadInput);
        CHECK(cli({"--exact", "limit", "--gallery", "quantum"}).code == kExitBadInput);
        CHECK(cli({}).code == kExitBadInput);
        CHECK(cli({"limit", "--gallery", "single-flip", "--p", "3/2"}).code == kExitBadInput);
        CHECK(cli({"roots", "--poly", "[1,"}).code == kExitBadInput);
        auto fit = cli({"fit", "--gallery", "hc-walk:k=2", "--max-degree", "1"});
        CHECK(fit.code == kExitInvariant);
        CHECK(fit.json()["error"] == "invariant");
        CHECK(cli({"--version"}).code == kExitOk);
    }
}
