#pragma once

#include <stdexcept>
#include <string>

namespace tsui {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside its physical or documented domain (bad transmission, negative
/// photon number, malformed scenario...). The CLI maps these to exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A well-formed request whose evaluation failed. The CLI maps these to exit code 3.
class ComputationError : public Error {
public:
    using Error::Error;
};

/// The mean signal does not respond to the phase at the requested operating point.
class SlopeZero : public ComputationError {
public:
    using ComputationError::ComputationError;
};

/// The measured observable has (numerically) zero variance.
class DegenerateNoise : public ComputationError {
public:
    using ComputationError::ComputationError;
};

/// Too few samples for a meaningful spectral estimate.
class InsufficientData : public ComputationError {
public:
    using ComputationError::ComputationError;
};

/// The Fock cutoff is too small for the requested state.
class TruncationInadequate : public ComputationError {
public:
    using ComputationError::ComputationError;
};

}  // namespace tsui
