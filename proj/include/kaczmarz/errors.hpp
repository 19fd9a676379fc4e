#pragma once

#include <stdexcept>
#include <string>

namespace kaczmarz {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

/// Inconsistent or missing configuration (flags, phantom kinds, rule parameters).
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Base for failures that come from the numbers rather than the inputs' shape.
class NumericalError : public Error {
public:
    using Error::Error;
};

class DegenerateDataError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateRowError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateComponent : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateDenominator : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class MultipleLeadingEigenvalue : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class TooLargeError : public Error {
public:
    using Error::Error;
};

} // namespace kaczmarz
