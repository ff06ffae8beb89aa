#pragma once

#include <stdexcept>
#include <string>

namespace rfs {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Covariance is singular or too ill-conditioned to use.
class DegenerateCovarianceError : public Error {
public:
    using Error::Error;
};

/// Exponent outside the valid range (0, 1].
class InvalidExponentError : public Error {
public:
    using Error::Error;
};

/// Operation requires a non-empty density.
class EmptyDensityError : public Error {
public:
    using Error::Error;
};

/// A density violates a structural invariant (normalization, duplicate labels, ...).
class InvalidDensityError : public Error {
public:
    using Error::Error;
};

/// A tuning parameter is out of range.
class InvalidParameterError : public Error {
public:
    using Error::Error;
};

/// Fusion produced an all-zero weight set and cannot be normalized.
class DegenerateFusionError : public Error {
public:
    using Error::Error;
};

/// A config or data file does not match its documented schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

} // namespace rfs
