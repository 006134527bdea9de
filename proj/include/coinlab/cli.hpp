#pragma once

#include "coinlab/automaton.hpp"
#include "coinlab/constructions.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace coinlab {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitInvariant = 2, kExitPrecision = 3, kExitBadInput = 4 };

/// An automaton named on the command line: a gallery spec such as
/// "hc-walk:p=1/2,eps=1/10,k=10" or a JSON file. Exactly one field is set.
struct Target {
    std::string spec;
    std::optional<CoinAutomaton<Rational>> exact;
    std::optional<TimeDependentAutomaton<Rational>> timed;
    std::optional<QuantumParams> quantum;

    std::size_t dim() const;
    Sampler sampler() const;
};

/// Gallery names accepted by parse_target.
std::vector<std::string> gallery_names();
Target parse_target(const std::string& spec);
Target load_target_file(const std::string& path);

/// Runs the tool; JSON goes to `out` (or --out), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coinlab
