#pragma once

#include <stdexcept>
#include <string>

namespace vvc {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Graph is disconnected, singular, or otherwise structurally unusable.
struct TopologyError : Error {
    using Error::Error;
};

/// A physical or configuration parameter is outside its valid range.
struct ParameterError : Error {
    using Error::Error;
};

/// Vector or matrix sizes do not agree.
struct DimensionError : Error {
    using Error::Error;
};

/// A documented precondition was violated by the caller.
struct ContractViolation : Error {
    using Error::Error;
};

/// An iterative solver exhausted its budget before reaching tolerance.
struct ConvergenceError : Error {
    ConvergenceError(const std::string& what, double res) : Error(what), residual(res) {}
    double residual = 0.0;
};

/// Problems reading or interpreting an input file.
struct InputError : Error {
    using Error::Error;
};

} // namespace vvc
