#pragma once

// JSON exchange formats. Exact scalars are written as "num/den" strings.

#include "coinlab/advice_coin.hpp"
#include "coinlab/automaton.hpp"
#include "coinlab/rational.hpp"

#include <json.hpp>

#include <string>

namespace coinlab {

using Json = nlohmann::ordered_json;

/// Accepts "num/den" or decimal strings, and JSON integers or floats (read through their text).
Rational rational_from_json(const Json& j);
Json rational_to_json(const Rational& q);

/// {"dim", "mode", "accept", "reject", "accepting_set", "initial", "e0", "e1"}.
/// Matrices are rows of [re, im] pairs; a channel is {"kraus": [...], "weights": [...]}
/// with "weights" omitted when all are 1.
Json automaton_to_json(const CoinAutomaton<Rational>& m);
/// Real entries are written as round-trip decimal strings.
Json automaton_to_json(const CoinAutomaton<Real>& m);
/// Entries are read exactly.
CoinAutomaton<Rational> automaton_from_json(const Json& j);
/// {"time_dependent": true, ..., "steps": [{"e0", "e1"}, ...]} for steps 0..horizon-1.
Json timed_to_json(const TimeDependentAutomaton<Rational>& m);

Json polynomial_to_json(const Polynomial& p);
Polynomial polynomial_from_json(const Json& j);
Json rational_function_to_json(const RationalFunction& f);
Json root_interval_to_json(const RootInterval& r);
Json separation_to_json(const SeparationReport& s);
Json atlas_to_json(const TransitionAtlas& a);
Json advice_to_json(const AdviceRecord& r);

}  // namespace coinlab
