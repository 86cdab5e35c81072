#pragma once

#include <stdexcept>
#include <string>

namespace heatplan {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data violates an invariant (bad value, duplicate id, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A file does not match its declared schema (missing column, bad header).
class SchemaError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// A function was called with arguments outside its domain.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure cannot proceed (singular system, unreachable state).
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace heatplan
