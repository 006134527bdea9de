#include "coinlab/cli.hpp"

#include "coinlab/advice_coin.hpp"
#include "coinlab/errors.hpp"
#include "coinlab/fixed_point.hpp"
#include "coinlab/io.hpp"
#include "coinlab/rational.hpp"
#include "coinlab/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace coinlab {

// ---------------------------------------------------------------------------
// Targets

std::size_t Target::dim() const {
    if (exact) return exact->dim();
    if (timed) return timed->dim;
    return 4;
}

Sampler Target::sampler() const {
    if (exact) return Sampler(*exact);
    if (timed) return Sampler(*timed);
    PrecisionScope scope(quantum->precision_bits());
    return Sampler(quantum_distinguisher(*quantum));
}

std::vector<std::string> gallery_names() {
    return {"first-heads", "single-flip", "identity", "two-cycle", "hc-walk",
            "zero-vs-eps", "run-of-heads", "amplified", "quantum"};
}

namespace {

using Params = std::map<std::string, std::string>;

std::pair<std::string, Params> split_spec(const std::string& spec) {
    auto colon = spec.find(':');
    std::string name = spec.substr(0, colon);
    Params params;
    if (colon == std::string::npos) return {name, params};
    std::stringstream rest(spec.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw InvalidInput("gallery parameter '" + item + "' is not key=value");
        params[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return {name, params};
}

class ParamReader {
public:
    ParamReader(std::string name, Params p) : name_(std::move(name)), p_(std::move(p)) {}

    Rational rational(const std::string& key, const Rational& fallback) {
        auto it = take(key);
        return it ? parse_rational(*it) : fallback;
    }
    unsigned integer(const std::string& key, unsigned fallback) {
        auto it = take(key);
        if (!it) return fallback;
        Rational v = parse_rational(*it);
        if (v < 0 || mp::denominator(v) != 1 || v > 1000000)
            throw InvalidInput("parameter '" + key + "' must be a nonnegative integer");
        return mp::numerator(v).convert_to<unsigned>();
    }
    std::string text(const std::string& key, const std::string& fallback) {
        auto it = take(key);
        return it ? *it : fallback;
    }
    void finish() const {
        if (!p_.empty()) throw InvalidInput("unknown parameter '" + p_.begin()->first + "' for " + name_);
    }

private:
    std::optional<std::string> take(const std::string& key) {
        auto it = p_.find(key);
        if (it == p_.end()) return std::nullopt;
        std::string v = it->second;
        p_.erase(it);
        return v;
    }
    std::string name_;
    Params p_;
};

CoinAutomaton<Rational> simple_gallery(const std::string& name) {
    if (name == "first-heads") return first_heads();
    if (name == "single-flip") return single_flip();
    if (name == "two-cycle") return two_cycle();
    if (name == "identity") return identity_automaton();
    throw InvalidInput("'" + name + "' cannot be used as a base machine");
}

}  // namespace

Target parse_target(const std::string& spec) {
    auto [name, params] = split_spec(spec);
    ParamReader r(name, params);
    Target t;
    t.spec = spec;
    if (name == "first-heads" || name == "single-flip" || name == "two-cycle") {
        t.exact = simple_gallery(name);
    } else if (name == "identity") {
        t.exact = identity_automaton(parse_mode(r.text("mode", "one_sided")));
    } else if (name == "hc-walk") {
        t.exact = hc_walk(r.rational("p", Rational(1, 2)), r.rational("eps", Rational(1, 10)), r.integer("k", 10));
    } else if (name == "zero-vs-eps") {
        t.exact = zero_vs_eps(r.rational("eps", Rational(1, 10)));
    } else if (name == "run-of-heads") {
        t.timed = run_of_heads(r.rational("eps", Rational(1, 4)));
    } else if (name == "amplified") {
        auto base = simple_gallery(r.text("base", "single-flip"));
        t.exact = amplified(base, r.integer("copies", 3));
    } else if (name == "quantum") {
        QuantumParams q{r.rational("p", Rational(1, 2)), r.rational("eps", Rational(1, 10)), r.integer("a", 10000),
                        r.integer("b", 7500)};
        q.validate();
        t.quantum = q;
    } else {
        std::string known;
        for (const auto& n : gallery_names()) known += (known.empty() ? "" : ", ") + n;
        throw InvalidInput("unknown gallery automaton '" + name + "' (known: " + known + ")");
    }
    r.finish();
    return t;
}

Target load_target_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidInput("cannot open '" + path + "'");
    Json j;
    try {
        j = Json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("'" + path + "': " + e.what());
    }
    Target t;
    t.spec = path;
    t.exact = automaton_from_json(j);
    return t;
}

// ---------------------------------------------------------------------------
// Shared evaluation

namespace {

struct Globals {
    unsigned precision_bits = 0;
    bool exact = false;
    std::uint64_t seed = 1;
    std::size_t trials = 10000;
    std::size_t t_max = kDefaultCutoff;
    std::string out;
    std::string csv;
    std::string svg;
    bool trials_given = false;
};

struct Value {
    std::optional<Rational> exact;
    Rational binary;  // the computed value, exactly (equals *exact when set)
    std::string text;
    double approx = 0;
    double error = 0;
    unsigned bits = 0;
    std::string method;
};

Value evaluate(const Target& t, const Rational& p, const Globals& g) {
    Value v;
    if (t.exact) {
        const auto& m = *t.exact;
        v.exact = m.mode() == AcceptMode::limit ? cesaro_accept(m, p) : limiting_accept(m, p);
        v.method = m.mode() == AcceptMode::limit ? "exact-cesaro" : "exact-abel";
    } else if (t.timed) {
        v.exact = accept_prob_at(*t.timed, p, t.timed->horizon);
        v.method = "exact-horizon";
    } else {
        if (g.exact) throw InvalidInput("'" + t.spec + "' has irrational entries; drop --exact");
        auto st = quantum_limit(*t.quantum, p, g.precision_bits);
        PrecisionScope scope(st.precision_bits);
        const std::size_t a = 2, s = 4;
        v.binary = to_rational(st.state[a * s + a].re);
        v.text = to_string(st.state[a * s + a].re, 30);
        v.approx = to_double(st.state[a * s + a].re);
        v.error = st.error;
        v.bits = st.precision_bits;
        v.method = "extrapolated";
        return v;
    }
    v.binary = *v.exact;
    v.text = to_string(*v.exact);
    v.approx = to_double(*v.exact);
    return v;
}

Json value_json(const Rational& p, const Value& v) {
    Json j;
    j["p"] = to_string(p);
    j["a"] = v.text;
    j["a_approx"] = v.approx;
    j["error"] = v.error;
    j["precision_bits"] = v.bits;
    j["method"] = v.method;
    return j;
}

Json mc_json(const MonteCarloSummary& s, const std::optional<double>& reference) {
    Json j;
    j["seed"] = s.seed;
    j["trials"] = s.trials;
    j["cutoff"] = s.cutoff;
    j["accepted"] = s.accepted;
    j["rejected"] = s.rejected;
    j["unresolved"] = s.unresolved;
    j["accept_rate"] = s.accept_rate();
    j["standard_error"] = s.standard_error();
    if (reference) j["z_score"] = (s.accept_rate() - *reference) / s.standard_error();
    return j;
}

Rational parse_bias(const std::string& text) {
    Rational p = parse_rational(text);
    if (p < 0 || p > 1) throw InvalidInput("bias " + text + " is outside [0, 1]");
    return p;
}

Target resolve(const std::string& gallery, const std::string& file) {
    if (!gallery.empty() && !file.empty()) throw InvalidInput("give either --gallery or --file, not both");
    if (!file.empty()) return load_target_file(file);
    if (gallery.empty()) throw InvalidInput("an automaton is required (--gallery or --file)");
    return parse_target(gallery);
}

std::function<Rational(const Rational&)> exact_curve(const Target& t) {
    if (t.exact) {
        const auto m = *t.exact;
        return [m](const Rational& p) {
            return m.mode() == AcceptMode::limit ? cesaro_accept(m, p) : limiting_accept(m, p);
        };
    }
    if (t.timed) {
        const auto m = *t.timed;
        return [m](const Rational& p) { return accept_prob_at(m, p, m.horizon); };
    }
    throw InvalidInput("'" + t.spec + "' has irrational entries and no exact acceptance curve");
}

unsigned fit_degree(const Target& t, unsigned requested) {
    if (requested) return requested;
    if (t.timed) return static_cast<unsigned>(t.timed->horizon);
    return static_cast<unsigned>(t.dim() * t.dim());
}

void emit_curve(const Globals& g, const std::string& title, const std::vector<Series>& series) {
    if (!g.csv.empty()) write_file(g.csv, csv_table("p", series));
    if (!g.svg.empty()) write_file(g.svg, svg_plot(title, "coin bias p", "acceptance", series));
}

// ---------------------------------------------------------------------------
// Commands

Json cmd_limit(const Target& t, const std::vector<std::string>& ps, unsigned grid, const Globals& g) {
    Json j;
    j["automaton"] = t.spec;
    Json results = Json::array();
    for (const auto& text : ps) {
        Rational p = parse_bias(text);
        Value v = evaluate(t, p, g);
        if (ps.size() == 1) j["a"] = v.text;
        results.push_back(value_json(p, v));
    }
    j["results"] = std::move(results);
    if (grid) {
        Series s{"a(p)", {}, {}};
        for (unsigned i = 0; i <= grid; ++i) {
            Rational p(i, grid);
            s.x.push_back(to_double(p));
            s.y.push_back(evaluate(t, p, g).approx);
        }
        emit_curve(g, "acceptance of " + t.spec, {s});
        j["grid_points"] = grid + 1;
    }
    return j;
}

Json cmd_gap(const Target& t, const std::optional<std::string>& p_text, const std::optional<std::string>& eps_text,
             const std::string& second, const Globals& g) {
    Rational p = t.quantum ? t.quantum->p : Rational(1, 2);
    Rational eps = t.quantum ? t.quantum->epsilon : Rational(1, 10);
    if (p_text) p = parse_bias(*p_text);
    if (eps_text) eps = parse_rational(*eps_text);
    Json j;
    j["automaton"] = t.spec;
    std::optional<Target> other;
    if (!second.empty()) {
        const bool is_file = second.size() > 5 && second.substr(second.size() - 5) == ".json";
        other = is_file ? load_target_file(second) : parse_target(second);
    }
    const Target& t2 = other ? *other : t;
    const Rational p2 = other ? p : p + eps;
    if (p2 > 1) throw InvalidInput("p + eps exceeds 1");
    Value lo = evaluate(t, p, g), hi = evaluate(t2, p2, g);
    j["low"] = value_json(p, lo);
    j["high"] = value_json(p2, hi);
    if (other) j["second_automaton"] = other->spec;
    if (lo.exact && hi.exact) {
        Rational gap = *hi.exact - *lo.exact;
        j["gap"] = to_string(gap);
        j["gap_approx"] = to_double(gap);
        j["gap_lower"] = to_double(gap);
    } else {
        PrecisionScope scope(std::max(lo.bits, hi.bits));
        j["gap"] = to_string(from_rational<Real>(hi.binary - lo.binary), 30);
        j["gap_approx"] = hi.approx - lo.approx;
        j["gap_lower"] = hi.approx - lo.approx - lo.error - hi.error;
    }
    j["error_bound"] = lo.error + hi.error;
    // Trajectories of the quantum machine need ~1/alpha steps each; only on request.
    const bool run_mc = g.trials > 0 && (!t.quantum || g.trials_given);
    if (run_mc) {
        Sampler s1 = t.sampler(), s2 = t2.sampler();
        auto m1 = monte_carlo(s1, to_double(p), g.t_max, g.trials, g.seed);
        auto m2 = monte_carlo(s2, to_double(p2), g.t_max, g.trials, g.seed);
        j["monte_carlo"] = {{"low", mc_json(m1, lo.approx)}, {"high", mc_json(m2, hi.approx)},
                            {"gap", m2.accept_rate() - m1.accept_rate()}};
    } else {
        j["monte_carlo"] = nullptr;
    }
    return j;
}

Json cmd_fit(const Target& t, unsigned max_degree, unsigned grid, const Globals& g) {
    auto f = exact_curve(t);
    const unsigned d = fit_degree(t, max_degree);
    FitResult fit = fit_rational(f, d);
    Json j;
    j["automaton"] = t.spec;
    j["degree_bound"] = d;
    j["fit"] = rational_function_to_json(fit.fn);
    j["num_degree"] = fit.fn.num.degree();
    j["den_degree"] = fit.fn.den.degree();
    j["attempts"] = fit.attempts;
    j["samples"] = fit.samples.size();
    Json val = Json::array();
    for (const auto& x : fit.validation) val.push_back(to_string(x));
    j["validation_points"] = std::move(val);
    j["poles_in_open_unit_interval"] = fit.fn.den.degree() > 0 ? count_roots(fit.fn.den, 0, 1) : 0;
    if (grid) {
        Series s{"fit", {}, {}};
        for (unsigned i = 0; i <= grid; ++i) {
            double x = static_cast<double>(i) / grid;
            s.x.push_back(x);
            s.y.push_back(fit.fn.num.eval(x) / fit.fn.den.eval(x));
        }
        emit_curve(g, "rational fit of " + t.spec, {s});
    }
    return j;
}

Json cmd_atlas(const std::vector<std::string>& gallery, const std::vector<std::string>& files,
               const std::optional<std::string>& p_star_text, unsigned bits) {
    std::vector<std::pair<std::string, RationalFunction>> family;
    std::vector<Target> targets;
    for (const auto& spec : gallery) targets.push_back(parse_target(spec));
    for (const auto& path : files) targets.push_back(load_target_file(path));
    if (targets.empty()) throw InvalidInput("atlas needs at least one --gallery or --file member");
    for (const auto& t : targets) {
        try {
            family.emplace_back(t.spec, fit_rational(exact_curve(t), fit_degree(t, 0)).fn);
        } catch (const InvariantViolation& e) {
            throw InvariantViolation("fit failed for '" + t.spec + "': " + e.what());
        }
    }
    TransitionAtlas atlas = build_atlas(family, bits);
    Json j = atlas_to_json(atlas);
    if (p_star_text) {
        Rational p_star = parse_bias(*p_star_text);
        AdviceRecord rec = build_advice(atlas, p_star);
        j["p_star"] = to_string(p_star);
        j["advice"] = advice_to_json(rec);
        Json margins = Json::array();
        for (const auto& [label, fn] : family) {
            Json m;
            m["label"] = label;
            m["a_p_star"] = to_string(fn(p_star));
            m["a_r"] = to_string(fn(rec.r));
            m["a_p_star_approx"] = to_double(fn(p_star));
            m["a_r_approx"] = to_double(fn(rec.r));
            margins.push_back(std::move(m));
        }
        j["margins"] = std::move(margins);
    }
    return j;
}

Json cmd_roots(const std::string& poly_text, const std::string& lo_text, const std::string& hi_text, unsigned bits,
               unsigned digits) {
    std::string body = poly_text;
    body.erase(0, body.find_first_not_of(" \t"));
    body.erase(body.find_last_not_of(" \t") + 1);
    if (!body.empty() && body.front() == '[') {
        if (body.back() != ']') throw InvalidInput("unbalanced brackets in --poly");
        body = body.substr(1, body.size() - 2);
    }
    Json pj = Json::array();
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok.erase(0, tok.find_first_not_of(" \t\""));
        tok.erase(tok.find_last_not_of(" \t\"") + 1);
        if (tok.empty()) throw InvalidInput("empty coefficient in --poly");
        pj.push_back(tok);
    }
    if (body.empty() || body.back() == ',') throw InvalidInput("--poly needs coefficients like [1, -2, 1]");
    Polynomial p = polynomial_from_json(pj);
    if (p.is_zero()) throw InvalidInput("zero polynomial");
    Rational lo = parse_rational(lo_text), hi = parse_rational(hi_text);
    auto roots = isolate_roots(p, lo, hi, bits);
    Polynomial q = square_free(p);
    Json j;
    j["polynomial"] = polynomial_to_json(p);
    j["square_free"] = polynomial_to_json(q);
    j["interval"] = {to_string(lo), to_string(hi)};
    Json list = Json::array();
    for (const auto& r : roots) {
        Json e = root_interval_to_json(r);
        if (digits) {
            std::string b;
            for (unsigned i = 1; i <= digits; ++i) b += root_bit(q, r, i) ? '1' : '0';
            e["fraction_bits"] = b;
        }
        list.push_back(std::move(e));
    }
    j["count"] = roots.size();
    j["roots"] = std::move(list);
    j["separation"] = separation_to_json(min_separation(p));
    return j;
}

Json cmd_simulate(const Target& t, const std::vector<std::string>& ps, std::size_t traces, const Globals& g) {
    Sampler s = t.sampler();
    Json j;
    j["automaton"] = t.spec;
    Json results = Json::array();
    for (const auto& text : ps) {
        Rational p = parse_bias(text);
        std::optional<double> reference;
        Json e;
        e["p"] = to_string(p);
        if (!t.quantum) {
            Value v = evaluate(t, p, g);
            reference = v.approx;
            e["exact"] = v.text;
        }
        auto summary = monte_carlo(s, to_double(p), g.t_max, g.trials, g.seed);
        e["monte_carlo"] = mc_json(summary, reference);
        Json tr = Json::array();
        for (std::size_t k = 0; k < traces; ++k) {
            RunTrace run = s.run(to_double(p), g.t_max, g.seed, k);
            std::string flips;
            for (std::size_t i = 0; i < run.flips.size() && i < 256; ++i) flips += run.flips[i] ? 'H' : 'T';
            tr.push_back({{"trial", run.trial},
                          {"outcome", to_string(run.outcome)},
                          {"halt_step", run.halt_step ? Json(*run.halt_step) : Json(nullptr)},
                          {"flips", flips},
                          {"flips_truncated", run.flips.size() > 256}});
        }
        if (traces) e["traces"] = std::move(tr);
        results.push_back(std::move(e));
    }
    j["results"] = std::move(results);
    return j;
}

Json cmd_gallery(const std::string& spec, bool list) {
    if (list || spec.empty()) {
        Json j;
        j["gallery"] = gallery_names();
        return j;
    }
    Target t = parse_target(spec);
    Json j;
    j["name"] = spec;
    if (t.exact) j["automaton"] = automaton_to_json(*t.exact);
    if (t.timed) j["automaton"] = timed_to_json(*t.timed);
    if (t.quantum) {
        PrecisionScope scope(t.quantum->precision_bits());
        j["automaton"] = automaton_to_json(quantum_distinguisher(*t.quantum));
        j["precision_bits"] = t.quantum->precision_bits();
    }
    return j;
}

Json advice_encode(const std::string& bits) {
    BiasEncoding e = encode_bias(bits);
    return {{"bits", e.bits}, {"bias", to_string(e.bias)}, {"trials", e.trials}};
}

Json advice_decode(const std::string& bias_text, unsigned s, std::optional<std::uint64_t> heads, const Globals& g) {
    if (s == 0) throw InvalidInput("--s must be positive");
    const std::uint64_t trials = g.trials_given ? g.trials : default_trials(s);
    Json j;
    std::string recovered;
    if (heads) {
        recovered = decode_count(*heads, trials, s);
        j["heads"] = *heads;
    } else {
        if (bias_text.empty()) throw InvalidInput("decode needs --bias or --heads");
        Rational p = parse_bias(bias_text);
        j["bias"] = to_string(p);
        recovered = decode_bits(bernoulli_source(p, g.seed), s, trials);
    }
    j["s"] = s;
    j["trials"] = trials;
    j["recovered"] = recovered;
    j["recovered_bias"] = to_string(encode_bias(recovered).bias);
    return j;
}

Json advice_roundtrip(const std::string& bits, unsigned repeat, const Globals& g) {
    if (repeat == 0) throw InvalidInput("--repeat must be positive");
    BiasEncoding e = encode_bias(bits);
    const std::uint64_t trials = g.trials_given ? g.trials : e.trials;
    Json runs = Json::array();
    unsigned ok = 0;
    std::string first;
    for (unsigned k = 0; k < repeat; ++k) {
        Roundtrip r = roundtrip(bits, g.seed + k, trials);
        if (k == 0) first = r.recovered;
        ok += r.success;
        runs.push_back({{"seed", g.seed + k}, {"heads", r.heads}, {"recovered", r.recovered}, {"success", r.success}});
    }
    Json j;
    j["bits"] = bits;
    j["bias"] = to_string(e.bias);
    j["trials"] = trials;
    j["recovered"] = first;
    j["success"] = ok == repeat;
    j["success_rate"] = static_cast<double>(ok) / repeat;
    j["runs"] = std::move(runs);
    return j;
}

std::string config_text(const std::vector<std::string>& args) {
    // Output destinations do not change results and stay out of the hash.
    Json a = Json::array();
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& s = args[i];
        if (s == "--out" || s == "--csv" || s == "--svg") {
            ++i;
            continue;
        }
        if (s.rfind("--out=", 0) == 0 || s.rfind("--csv=", 0) == 0 || s.rfind("--svg=", 0) == 0) continue;
        a.push_back(s);
    }
    return a.dump();
}

}  // namespace

// ---------------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"coinlab: coin-flipping automata, limiting acceptance and advice coins"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Globals g;
    app.add_option("--precision-bits", g.precision_bits, "minimum working precision for irrational automata")
        ->check(CLI::Range(0u, 1u << 16));
    app.add_flag("--exact", g.exact, "refuse inexact computation");
    app.add_option("--seed", g.seed, "random seed")->capture_default_str();
    auto* trials_opt = app.add_option("--trials", g.trials, "Monte Carlo trials")->capture_default_str();
    app.add_option("--t-max", g.t_max, "step cutoff for simulation")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "write the JSON result here instead of stdout");
    app.add_option("--csv", g.csv, "write the (p, a(p)) curve as CSV");
    app.add_option("--svg", g.svg, "write the curve as an SVG plot");

    std::string gallery, file, second;
    std::vector<std::string> ps;
    unsigned grid = 0, max_degree = 0, bits = 64, digits = 0, repeat = 10, s_bits = 0;
    std::optional<std::string> p_text, eps_text, p_star;
    std::vector<std::string> members, member_files;
    std::string poly, lo = "0", hi = "1", bit_string, bias_text, gallery_name;
    std::optional<std::uint64_t> heads;
    std::size_t traces = 0;
    bool list = false;

    auto source = [&](CLI::App* c) {
        c->add_option("--gallery,-g", gallery, "gallery spec, e.g. hc-walk:p=1/2,eps=1/10,k=10");
        c->add_option("--file,-f", file, "automaton JSON file");
    };

    auto* limit = app.add_subcommand("limit", "limiting acceptance a(p)");
    source(limit);
    limit->add_option("--p", ps, "bias (repeatable)");
    limit->add_option("--grid", grid, "also tabulate a(p) at p = i/N for the CSV/SVG outputs");

    auto* gap = app.add_subcommand("gap", "a(p + eps) - a(p), exact or extrapolated, plus Monte Carlo");
    source(gap);
    gap->add_option("--p", p_text, "lower bias");
    gap->add_option("--eps", eps_text, "bias offset");
    gap->add_option("--against", second, "second automaton (gallery spec or .json) compared at the same p");

    auto* fit = app.add_subcommand("fit", "exact rational function Q(p)/R(p) for a(p)");
    source(fit);
    fit->add_option("--max-degree", max_degree, "degree bound (default S^2)");
    fit->add_option("--grid", grid, "tabulate the fit at p = i/N for the CSV/SVG outputs");

    auto* atlas = app.add_subcommand("atlas", "potential transition values of a family, with optional advice");
    atlas->add_option("--gallery,-g", members, "family member gallery spec (repeatable)");
    atlas->add_option("--file,-f", member_files, "family member JSON file (repeatable)");
    atlas->add_option("--p-star", p_star, "true bias; adds the advice record");
    atlas->add_option("--bits", bits, "isolation precision")->capture_default_str();

    auto* advice = app.add_subcommand("advice", "bit strings stored in a coin bias");
    advice->require_subcommand(1);
    auto* encode = advice->add_subcommand("encode", "bits -> bias");
    encode->add_option("--bits", bit_string, "bit string")->required();
    auto* decode = advice->add_subcommand("decode", "flips -> bits");
    decode->add_option("--bias", bias_text, "simulate a coin with this bias");
    decode->add_option("--heads", heads, "decode a recorded tally instead");
    decode->add_option("--s", s_bits, "number of bits")->required();
    auto* round = advice->add_subcommand("roundtrip", "encode, simulate, decode");
    round->add_option("--bits", bit_string, "bit string")->required();
    round->add_option("--repeat", repeat, "seeds seed..seed+N-1")->capture_default_str();

    auto* roots = app.add_subcommand("roots", "real roots of a polynomial");
    roots->add_option("--poly", poly, "ascending coefficients, e.g. \"[3/16, -1, 1]\"")->required();
    roots->add_option("--lo", lo, "open interval start")->capture_default_str();
    roots->add_option("--hi", hi, "open interval end")->capture_default_str();
    roots->add_option("--bits", bits, "interval width 2^-bits")->capture_default_str();
    roots->add_option("--digits", digits, "report this many fraction bits of each root");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo trajectories");
    source(simulate);
    simulate->add_option("--p", ps, "bias (repeatable)");
    simulate->add_option("--traces", traces, "include the first N run traces");

    auto* gal = app.add_subcommand("gallery", "emit a gallery automaton as JSON");
    gal->add_option("name", gallery_name, "gallery spec");
    gal->add_flag("--list", list, "list gallery names");

    auto emit_error = [&](const std::string& kind, const std::string& what, std::optional<double> achieved) {
        err << "error: " << what << '\n';
        Json j;
        j["error"] = kind;
        j["message"] = what;
        if (achieved) j["achieved_error"] = *achieved;
        out << j.dump(2) << '\n';
    };

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        g.trials_given = trials_opt->count() > 0;

        Json result;
        std::string command;
        if (*limit) {
            command = "limit";
            if (ps.empty()) ps = {"1/2"};
            result = cmd_limit(resolve(gallery, file), ps, grid, g);
        } else if (*gap) {
            command = "gap";
            result = cmd_gap(resolve(gallery, file), p_text, eps_text, second, g);
        } else if (*fit) {
            command = "fit";
            result = cmd_fit(resolve(gallery, file), max_degree, grid, g);
        } else if (*atlas) {
            command = "atlas";
            result = cmd_atlas(members, member_files, p_star, bits);
        } else if (*advice) {
            if (*encode) {
                command = "advice encode";
                result = advice_encode(bit_string);
            } else if (*decode) {
                command = "advice decode";
                result = advice_decode(bias_text, s_bits, heads, g);
            } else {
                command = "advice roundtrip";
                result = advice_roundtrip(bit_string, repeat, g);
            }
        } else if (*roots) {
            command = "roots";
            result = cmd_roots(poly, lo, hi, bits, digits);
        } else if (*simulate) {
            command = "simulate";
            if (ps.empty()) ps = {"1/2"};
            result = cmd_simulate(resolve(gallery, file), ps, traces, g);
        } else {
            command = "gallery";
            result = cmd_gallery(gallery_name, list);
        }

        Json doc;
        doc["command"] = command;
        doc["version"] = kVersion;
        doc["config_hash"] = fnv1a_hex(config_text(args));
        doc["seed"] = g.seed;
        doc["precision_bits"] = g.precision_bits;
        for (auto& [k, v] : result.items()) doc[k] = v;
        const std::string text = doc.dump(2) + "\n";
        if (g.out.empty())
            out << text;
        else
            write_file(g.out, text);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const PrecisionError& e) {
        emit_error("precision", e.what(), e.achieved_error());
        return kExitPrecision;
    } catch (const InvariantViolation& e) {
        emit_error("invariant", e.what(), std::nullopt);
        return kExitInvariant;
    } catch (const InvalidInput& e) {
        emit_error("input", e.what(), std::nullopt);
        return kExitBadInput;
    } catch (const nlohmann::json::exception& e) {
        emit_error("input", e.what(), std::nullopt);
        return kExitBadInput;
    } catch (const std::exception& e) {
        emit_error("internal", e.what(), std::nullopt);
        return kExitInvariant;
    }
}

}  // namespace coinlab
