#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cfbvp {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the documented range of an operation.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed expression text. position() is a 0-based character offset.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error("parse error at position " + std::to_string(position) + ": " + what),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Expression evaluated outside its real domain, or with an unbound variable.
class EvalError : public Error {
public:
    EvalError(const std::string& what, std::string subexpression)
        : Error(what + " in '" + subexpression + "'"), subexpression_(std::move(subexpression)) {}

    const std::string& subexpression() const noexcept { return subexpression_; }

private:
    std::string subexpression_;
};

/// Quadrature or operator produced a non-finite value.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Problem file is missing keys or carries out-of-range values.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A hypothesis required by the operation did not pass.
class HypothesisError : public Error {
public:
    using Error::Error;
};

/// Iteration diverged or ran out of budget.
class SolverError : public Error {
public:
    using Error::Error;
};

}  // namespace cfbvp
