#pragma once

#include <stdexcept>
#include <string>

namespace orthorand {

/// Base of every error the library throws. exit_code() follows the CLI
/// contract: 2 validation, 3 numeric, 4 IO.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept = 0;
};

class ValidationError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Operation requested on an object that cannot support it (e.g. density of
/// a discrete ensemble).
class UnsupportedError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NumericError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

/// Non-finite weight evaluation at a specific point.
class EvaluationError : public NumericError {
public:
    EvaluationError(const std::string& what, double point)
        : NumericError(what + " at x = " + std::to_string(point)), point_(point) {}
    double point() const noexcept { return point_; }

private:
    double point_;
};

class SolverError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Quadrature failed to converge to the requested tolerance.
class AccuracyError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Loss of orthogonality while building a recurrence table.
class StabilityError : public NumericError {
public:
    StabilityError(const std::string& what, int degree)
        : NumericError(what + " (degree reached: " + std::to_string(degree) + ")"), degree_(degree) {}
    int degree() const noexcept { return degree_; }

private:
    int degree_;
};

class ConditioningError : public NumericError {
public:
    using NumericError::NumericError;
};

class RangeError : public NumericError {
public:
    using NumericError::NumericError;
};

class IoError : public Error {
public:
    IoError(const std::string& what, std::string path)
        : Error(what + ": " + path), path_(std::move(path)) {}
    int exit_code() const noexcept override { return 4; }
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace orthorand
