#pragma once

#include <stdexcept>
#include <string>

namespace monk {

// Every failure raised by the library derives from monk::Error so callers can
// catch the whole family in one place (the CLI maps them onto exit codes).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A hyperparameter or argument outside its admissible range.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// A point handed to a kernel that cannot evaluate it (string given to rbf, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

// Cholesky failed even at the largest jitter level.
class NotPsdError : public Error {
public:
    using Error::Error;
};

class UnsupportedKernel : public Error {
public:
    using Error::Error;
};

// Unreadable or malformed input data.
class DataError : public Error {
public:
    using Error::Error;
};

// Inconsistent experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace monk
