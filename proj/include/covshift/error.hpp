#pragma once

#include <stdexcept>
#include <string>

namespace covshift {

/// Invalid arguments or precondition violations (bad dimensions, h <= 0, ...).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input files: CSV rows, spec files.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Base class for numerical failures surfaced to callers.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Local Gram matrix is numerically singular and no fallback was requested.
class SingularSystem : public NumericalError {
public:
    SingularSystem(double min_eigenvalue, double max_eigenvalue)
        : NumericalError("local polynomial system is singular (lambda_min = " +
                         std::to_string(min_eigenvalue) + ", lambda_max = " +
                         std::to_string(max_eigenvalue) + ")"),
          min_eigenvalue_(min_eigenvalue) {}

    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

/// Requested diagnostic does not exist for this fit (e.g. weights of a truncated fit).
class NotAvailable : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Every candidate of the smoothness grid failed to produce an estimate.
class AdaptiveFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace covshift
