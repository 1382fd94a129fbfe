#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace resolv {

namespace detail {

/// Compact number formatting for error messages.
inline std::string num_str(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace detail

/// Inputs violate an operation's contract (alphabet mismatch, parameter
/// out of range, precondition failure).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Data fails structural validation (negative mass, row not summing to 1,
/// malformed model file).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An exact enumeration would exceed the configured budget.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The output-matching polytope is empty.
class InfeasibilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A typical-set truncation has zero mass (tau == 0).
class DegenerateTruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace resolv
