#pragma once

#include <stdexcept>
#include <string>

namespace coinlab {

/// Malformed arguments or input files.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A checked mathematical invariant did not hold.
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A floating-point computation did not reach its tolerance within the
/// precision budget.
class PrecisionError : public std::runtime_error {
public:
    PrecisionError(const std::string& what, double achieved_error)
        : std::runtime_error(what), achieved_error_(achieved_error) {}
    double achieved_error() const { return achieved_error_; }

private:
    double achieved_error_;
};

}  // namespace coinlab
