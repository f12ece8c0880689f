#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace polyqc {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user input: malformed data, inconsistent dimensions, unusable configs.
// The CLI maps these to exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

class DimensionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NotInBasisError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ConfigurationError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class BindingError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InvalidTransitionError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class UnsupportedInputError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InvalidArgumentError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InvalidHistoryError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InvalidDatasetError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class UnknownTokenError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class OverlongError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class OutOfRangeLabelError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class StratificationError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class SamplingError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
public:
    ParseError(const std::string& what, std::size_t line)
        : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Numerical failures at run time (exit code 1).
class SolverError : public Error {
public:
    using Error::Error;
};

class DivergedError : public Error {
public:
    using Error::Error;
};

}  // namespace polyqc
