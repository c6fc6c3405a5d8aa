#pragma once

#include <stdexcept>
#include <string>

namespace cmms {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Input data violates a documented precondition (shape, finiteness, labels).
class DataError : public Error {
public:
    using Error::Error;
};

/// A factorization or eigen-decomposition failed.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Invalid run configuration or hyperparameter.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace cmms
