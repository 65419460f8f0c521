#pragma once

#include <stdexcept>
#include <string>

namespace scoredec {

/// Caller supplied data outside the loss family's domain, misaligned series, or
/// a malformed configuration.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A fit or nuisance-matrix estimate could not be produced (infeasible start,
/// singular curvature matrix, vanishing density estimate, ...).
class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operation is undefined for the requested loss family (e.g. derivatives of
/// the check loss).
class UnsupportedOperation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace scoredec
