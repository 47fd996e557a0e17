#pragma once

#include <stdexcept>
#include <string>

namespace gibbslie {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed user input: files, element strings, parameters.
class InputError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NotAnIdeal : public Error {
public:
    using Error::Error;
};

/// Eigen-solver or decomposition failure; never turned into a verdict.
class SpectralError : public Error {
public:
    using Error::Error;
};

class DecompositionError : public Error {
public:
    using Error::Error;
};

class NotRegular : public Error {
public:
    using Error::Error;
};

class BoundExceeded : public Error {
public:
    using Error::Error;
};

/// The element lies outside every supplied Cartan subalgebra and conjugating
/// it into one is not supported.
class NeedsConjugation : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

}  // namespace gibbslie
