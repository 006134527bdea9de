#include "coinlab/io.hpp"

#include "coinlab/errors.hpp"

namespace coinlab {

Rational rational_from_json(const Json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return parse_rational(j.dump());
    if (j.is_number_float()) return parse_rational(j.dump());
    throw InvalidInput("expected a number, got " + j.dump());
}

Json rational_to_json(const Rational& q) { return to_string(q); }

namespace {

template <class F>
Json scalar_to_json(const F& x) {
    return to_string(x);
}

template <class F>
Json matrix_to_json(const Matrix<F>& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back({scalar_to_json(m(i, j).re), scalar_to_json(m(i, j).im)});
        rows.push_back(std::move(row));
    }
    return rows;
}

template <class F>
Json channel_to_json(const Superoperator<F>& e) {
    Json out;
    Json ops = Json::array(), weights = Json::array();
    bool unit = true;
    for (const auto& t : e.terms()) {
        ops.push_back(matrix_to_json(t.op));
        weights.push_back(scalar_to_json(t.weight));
        if (t.weight != 1) unit = false;
    }
    out["kraus"] = std::move(ops);
    if (!unit) out["weights"] = std::move(weights);
    return out;
}

template <class F>
Json to_json_impl(const CoinAutomaton<F>& m) {
    Json j;
    j["dim"] = m.dim();
    j["mode"] = to_string(m.mode());
    j["accept"] = m.accept_index();
    j["reject"] = m.reject_index() ? Json(*m.reject_index()) : Json(nullptr);
    j["accepting_set"] = m.accepting_set();
    j["initial"] = matrix_to_json(m.initial().matrix());
    j["e0"] = channel_to_json(m.e0());
    j["e1"] = channel_to_json(m.e1());
    return j;
}

std::size_t index_field(const Json& j, const char* key) {
    if (!j.contains(key)) throw InvalidInput(std::string("missing field '") + key + "'");
    const Json& v = j.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        throw InvalidInput(std::string("field '") + key + "' must be a nonnegative integer");
    return v.get<std::size_t>();
}

Matrix<Rational> matrix_from_json(const Json& j, std::size_t dim, const std::string& what) {
    if (!j.is_array() || j.size() != dim) throw InvalidInput(what + ": expected " + std::to_string(dim) + " rows");
    Matrix<Rational> m(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const Json& row = j[i];
        if (!row.is_array() || row.size() != dim)
            throw InvalidInput(what + ": row " + std::to_string(i) + " must have " + std::to_string(dim) + " entries");
        for (std::size_t k = 0; k < dim; ++k) {
            const Json& e = row[k];
            if (e.is_array()) {
                if (e.size() != 2) throw InvalidInput(what + ": complex entries are [re, im]");
                m(i, k) = Complex<Rational>(rational_from_json(e[0]), rational_from_json(e[1]));
            } else {
                m(i, k) = Complex<Rational>(rational_from_json(e));
            }
        }
    }
    return m;
}

Superoperator<Rational> channel_from_json(const Json& j, std::size_t dim, const std::string& what) {
    if (!j.is_object() || !j.contains("kraus")) throw InvalidInput(what + ": expected {\"kraus\": [...]}");
    const Json& ops = j.at("kraus");
    if (!ops.is_array() || ops.empty()) throw InvalidInput(what + ": empty Kraus list");
    std::vector<KrausTerm<Rational>> terms;
    for (std::size_t t = 0; t < ops.size(); ++t) {
        Rational w(1);
        if (j.contains("weights")) {
            const Json& ws = j.at("weights");
            if (!ws.is_array() || ws.size() != ops.size()) throw InvalidInput(what + ": weights/kraus length mismatch");
            w = rational_from_json(ws[t]);
        }
        terms.push_back({w, matrix_from_json(ops[t], dim, what + " operator " + std::to_string(t))});
    }
    return Superoperator<Rational>(dim, std::move(terms));
}

}  // namespace

Json automaton_to_json(const CoinAutomaton<Rational>& m) { return to_json_impl(m); }
Json automaton_to_json(const CoinAutomaton<Real>& m) { return to_json_impl(m); }

CoinAutomaton<Rational> automaton_from_json(const Json& j) {
    if (!j.is_object()) throw InvalidInput("automaton JSON must be an object");
    const std::size_t dim = index_field(j, "dim");
    if (dim == 0) throw InvalidInput("dim must be positive");
    AcceptMode mode = parse_mode(j.value("mode", std::string("halting")));
    const std::size_t accept = index_field(j, "accept");
    std::optional<std::size_t> reject;
    if (j.contains("reject") && !j.at("reject").is_null()) reject = index_field(j, "reject");
    std::vector<std::size_t> set;
    if (j.contains("accepting_set")) set = j.at("accepting_set").get<std::vector<std::size_t>>();
    if (!j.contains("initial")) throw InvalidInput("missing field 'initial'");
    DensityMatrix<Rational> initial(matrix_from_json(j.at("initial"), dim, "initial"));
    if (!j.contains("e0") || !j.contains("e1")) throw InvalidInput("missing channel 'e0' or 'e1'");
    return CoinAutomaton<Rational>(channel_from_json(j.at("e0"), dim, "e0"), channel_from_json(j.at("e1"), dim, "e1"),
                                   std::move(initial), accept, reject, mode, std::move(set));
}

Json timed_to_json(const TimeDependentAutomaton<Rational>& m) {
    Json j;
    j["time_dependent"] = true;
    j["dim"] = m.dim;
    j["accept"] = m.accept;
    j["reject"] = m.reject ? Json(*m.reject) : Json(nullptr);
    j["horizon"] = m.horizon;
    j["initial"] = matrix_to_json(m.initial.matrix());
    Json steps = Json::array();
    for (std::size_t t = 0; t < m.horizon; ++t) {
        auto [e0, e1] = m.generator(t);
        steps.push_back({{"e0", channel_to_json(e0)}, {"e1", channel_to_json(e1)}});
    }
    j["steps"] = std::move(steps);
    return j;
}

Json polynomial_to_json(const Polynomial& p) {
    Json a = Json::array();
    for (const auto& c : p.coeffs()) a.push_back(to_string(c));
    return a;
}

Polynomial polynomial_from_json(const Json& j) {
    if (!j.is_array()) throw InvalidInput("polynomial must be an ascending coefficient list");
    std::vector<Rational> c;
    for (const auto& e : j) c.push_back(rational_from_json(e));
    return Polynomial(std::move(c));
}

Json rational_function_to_json(const RationalFunction& f) {
    return {{"num", polynomial_to_json(f.num)}, {"den", polynomial_to_json(f.den)}, {"reduced", f.reduced}};
}

Json root_interval_to_json(const RootInterval& r) {
    Json j;
    j["lo"] = to_string(r.lo);
    j["hi"] = to_string(r.hi);
    j["exact"] = r.exact ? Json(to_string(*r.exact)) : Json(nullptr);
    j["approx"] = to_double(r.midpoint());
    return j;
}

Json separation_to_json(const SeparationReport& s) {
    Json j;
    j["root_count"] = s.root_count;
    j["observed"] = to_string(s.observed);
    j["observed_lower"] = to_string(s.observed_lower);
    j["mahler_bound"] = to_string(s.mahler_bound);
    j["observed_approx"] = to_double(s.observed);
    j["mahler_bound_approx"] = to_double(s.mahler_bound);
    j["holds"] = s.holds;
    return j;
}

Json atlas_to_json(const TransitionAtlas& a) {
    Json j;
    Json fam = Json::array();
    for (const auto& [label, fn] : a.family) {
        Json e = rational_function_to_json(fn);
        e["label"] = label;
        fam.push_back(std::move(e));
    }
    j["family"] = std::move(fam);
    j["product"] = polynomial_to_json(a.product);
    Json values = Json::array(), intervals = Json::array();
    for (const auto& v : a.potential_values) {
        // irrational values appear as plain numbers; "intervals" has the certified bounds
        values.push_back(v.exact ? Json(to_string(*v.exact)) : Json(to_double(v.midpoint())));
        intervals.push_back(root_interval_to_json(v));
    }
    j["potential_values"] = std::move(values);
    j["intervals"] = std::move(intervals);
    j["separation"] = to_string(a.separation);
    j["mahler"] = separation_to_json(a.mahler);
    return j;
}

Json advice_to_json(const AdviceRecord& r) {
    Json j;
    j["w"] = r.w;
    j["r"] = to_string(r.r);
    j["h"] = r.h;
    j["p0"] = root_interval_to_json(r.p0);
    j["epsilon_lower"] = to_string(r.epsilon_lower);
    j["epsilon_upper"] = to_string(r.epsilon_upper);
    std::string bits;
    for (unsigned i = 1; i <= r.h; ++i) bits += expansion_bit(r.r, i) ? '1' : '0';
    j["expansion"] = bits;
    return j;
}

}  // namespace coinlab
