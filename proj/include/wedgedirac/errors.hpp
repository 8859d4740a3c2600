#pragma once

#include <stdexcept>
#include <string>

namespace wedgedirac {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter lies outside the range where the formulas are valid.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical kernel produced or was fed a non-finite value.
class NumericalError : public Error {
public:
    using Error::Error;
};

class NoSignChange : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class MaxIterations : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A structural assumption (e.g. a unique root) was violated.
class InternalError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

/// A constructed object failed its own verification step.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

class ParameterMismatch : public Error {
public:
    using Error::Error;
};

class SingularTangent : public DomainError {
public:
    using DomainError::DomainError;
};

/// Malformed external input (curve files, CLI configuration).
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace wedgedirac
