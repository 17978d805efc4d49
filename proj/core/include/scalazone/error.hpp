#pragma once

#include <stdexcept>
#include <string>

namespace scalazone {

/// Bad input: parameters or data that violate a documented precondition.
/// The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A well-formed request that failed numerically (degenerate data,
/// non-convergence). The CLI maps this to exit code 1.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace scalazone
