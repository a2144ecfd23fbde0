#pragma once

#include <stdexcept>
#include <string>

namespace distdelay {

// Base of every error thrown by the library. The CLI maps ConfigError to
// exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (x < 0, lo > hi, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Invalid experiment setup: malformed config, step too large for the lags, ...
class ConfigError : public Error {
public:
    using Error::Error;
};

// A history lookup fell outside the known part of a trajectory.
class HistoryGapError : public Error {
public:
    HistoryGapError(double from, double to, const std::string& what);
    double gap_from() const noexcept { return from_; }
    double gap_to() const noexcept { return to_; }

private:
    double from_;
    double to_;
};

// The numerical state became non-finite.
class DivergenceError : public Error {
public:
    DivergenceError(double last_valid_time, const std::string& what);
    double last_valid_time() const noexcept { return last_valid_time_; }

private:
    double last_valid_time_;
};

// Operation requires a positive equilibrium that does not exist (or vice versa).
class RegimeError : public Error {
public:
    using Error::Error;
};

// Counterexample request violates the construction's hypotheses.
class SpecViolation : public Error {
public:
    using Error::Error;
};

// Several positive fixed points: outside the supported model class.
class AmbiguityError : public Error {
public:
    using Error::Error;
};

// Schwarzian derivative requested at a critical point of f.
class SingularityError : public Error {
public:
    using Error::Error;
};

}  // namespace distdelay
