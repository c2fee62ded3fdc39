#pragma once

#include <stdexcept>
#include <string>

namespace roofsim {

/// Base of every error the library throws. `exit_code()` is the CLI status.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what, int code = 1) : std::runtime_error(what), code_(code) {}
    int exit_code() const noexcept { return code_; }

private:
    int code_;
};

// Invalid distribution or model parameter.
class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what) : Error("parameter error: " + what, 2) {}
};

// Invalid configuration file or descriptor table.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config error: " + what, 2) {}
};

// Caller violated a precondition (empty batch, size mismatch, ...).
class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error("usage error: " + what, 1) {}
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error("domain error: " + what, 3) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("I/O error: " + what, 1) {}
};

// Malformed input files, mismatched ids, hidden columns found in a released table.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error("validation error: " + what, 3) {}
};

class IntegrityError : public Error {
public:
    explicit IntegrityError(const std::string& what) : Error("integrity error: " + what, 3) {}
};

// Gini with zero total loss or constant truth, correlation of a constant vector.
class UndefinedMetricError : public Error {
public:
    explicit UndefinedMetricError(const std::string& what) : Error("undefined metric: " + what, 4) {}
};

class CalibrationError : public Error {
public:
    CalibrationError(const std::string& what, double achievable)
        : Error("calibration error: " + what, 2), achievable_(achievable) {}
    double achievable() const noexcept { return achievable_; }

private:
    double achievable_;
};

}  // namespace roofsim
