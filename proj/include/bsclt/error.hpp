#pragma once

#include <stdexcept>
#include <string>

namespace bsclt {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside a function's mathematical domain (non-finite input, M <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A value type failed its invariants; `field()` names the offending member.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Adaptive integration ran out of subdivisions before meeting its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double best_estimate, double error_estimate)
        : Error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

    [[nodiscard]] double best_estimate() const noexcept { return best_estimate_; }
    [[nodiscard]] double error_estimate() const noexcept { return error_estimate_; }

private:
    double best_estimate_;
    double error_estimate_;
};

/// Discretization parameters produce an invalid model (e.g. a tree step probability outside (0,1)).
class ParameterizationError : public Error {
public:
    using Error::Error;
};

/// Too few observations for a statistic to be meaningful.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

}  // namespace bsclt
