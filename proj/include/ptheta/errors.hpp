#pragma once

#include <stdexcept>
#include <string>

namespace ptheta {

/// Input outside the mathematical domain of an operation (|x| <= 1 for G, x = 0 for R, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Truncation or product cap would be exceeded for the requested accuracy.
class PrecisionBudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A result does not fit in binary64 (use the scaled evaluators instead).
class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

/// An iteration (root solver, continuation, bisection) failed to converge.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Zero count from roots disagrees with the argument principle count.
class CountMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ptheta
