#pragma once

#include <stdexcept>
#include <string>

namespace hyplyap {

// Base class for all toolkit errors. Verdicts (infeasible, unsatisfied,
// NotFound, ...) are values, not exceptions; exceptions mean the inputs or
// the numerics broke a contract.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    using Error::Error;
};
struct ValidationError : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

// linearization
struct EigenFailure : Error {
    using Error::Error;
};
struct OrderingBreak : Error {
    using Error::Error;
};
struct SteadyStateViolation : Error {
    using Error::Error;
};

// boundary
struct OracleMismatch : Error {
    using Error::Error;
};

// lemma oracle
struct CombinatorialLimit : Error {
    using Error::Error;
};

// simulator
struct CflViolation : Error {
    using Error::Error;
};
struct NonFinite : Error {
    using Error::Error;
};

// lyapunov
struct DecayedToZero : Error {
    using Error::Error;
};

// counterexample
struct ResolutionError : Error {
    using Error::Error;
};
struct SupportError : Error {
    using Error::Error;
};
struct InconclusiveError : Error {
    using Error::Error;
};

} // namespace hyplyap
