#pragma once

#include <stdexcept>
#include <string>

namespace schwarz {

/// Base class for every failure raised by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (t <= 0, p <= 1, even M, ...).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Malformed GF1 / IJ1 / config input.
class FormatError : public Error {
public:
  using Error::Error;
};

/// A run would exceed the configured cell-operation budget.
class BudgetExceeded : public Error {
public:
  using Error::Error;
};

/// Non-finite accumulation or a quadrature that cannot be trusted.
class NumericalFailure : public Error {
public:
  using Error::Error;
};

/// An operation refused its input because a theorem hypothesis is not met
/// (unaudited integrand, non grid-exact half-space, non-radial input).
class HypothesisNotMet : public Error {
public:
  using Error::Error;
};

} // namespace schwarz
