#pragma once

#include <stdexcept>

namespace sacekit {

// Input files that cannot be read or decoded. The CLI maps this to exit 2.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Inputs that decode fine but violate a documented invariant (proportions
// off, outcome law on a dead cell, odd sample size, ...). CLI exit 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Estimation impossible on the given inputs. CLI exit 3.
class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The always-survivor stratum is empty (or cannot be nonempty given the
// observed survival rates), so the survivor-causal contrast does not exist.
class UndefinedSaceError : public EstimationError {
public:
    using EstimationError::EstimationError;
};

// No cross-arm component matching is consistent with the observed data.
class IdentificationError : public EstimationError {
public:
    using EstimationError::EstimationError;
};

// Every candidate matching implies a negative stratum proportion.
class InfeasibleError : public EstimationError {
public:
    using EstimationError::EstimationError;
};

}  // namespace sacekit
