#pragma once

#include <stdexcept>
#include <string>

namespace ctrf {

/// Base of all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inconsistent shapes, malformed files, out-of-range modes.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Invalid argument values (negative thresholds, bad ranks, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Non-finite iterates or breakdown inside a numerical kernel.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace ctrf
