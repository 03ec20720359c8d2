#pragma once

#include <stdexcept>
#include <string>

namespace lrbms {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user input: scenario values, grid sizes, option combinations.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A point or index that lies outside the object it is applied to.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Failure of a numerical procedure (non-convergence, singular systems, ...).
class NumericalError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, double residual, int iterations)
        : NumericalError(what), residual_(residual), iterations_(iterations) {}

    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    double residual_;
    int iterations_;
};

class SingularityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Time-of-flight transport without a usable flow direction.
class DegenerateFlowError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace lrbms
