#pragma once

#include <stdexcept>
#include <string>

namespace prunelab {

// Precondition violated by the caller (bad strategy, out-of-range rho, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerically meaningless result: nu0 <= m0^2, non-convergence, ...
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised by the ridge path when lambda <= 0; the caller should use the
// ridgeless (lambda -> 0+) formulas instead.
class RidgelessRequired : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

// |phi - p| too small for the ridgeless limits to be finite.
class InterpolationThreshold : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Strategy has no closed-form scalars (SigmoidPower); use quadrature.
class NoClosedForm : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace prunelab
