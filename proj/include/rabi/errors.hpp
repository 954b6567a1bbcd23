#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rabi {

enum class ErrorKind {
    Parameter,
    Sizing,
    Convergence,
    Degeneracy,
    Range,
    Integration,
    Capability,
    Config,
};

std::string_view to_string(ErrorKind kind);

/// Base class of every error raised by the library. `kind()` lets callers
/// (the sweep driver in particular) record a failure without RTTI games.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what) : Error(ErrorKind::Parameter, what) {}
};

class SizingError : public Error {
public:
    explicit SizingError(const std::string& what) : Error(ErrorKind::Sizing, what) {}
};

class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& what) : Error(ErrorKind::Convergence, what) {}
};

class DegeneracyError : public Error {
public:
    explicit DegeneracyError(const std::string& what) : Error(ErrorKind::Degeneracy, what) {}
};

class RangeError : public Error {
public:
    explicit RangeError(const std::string& what) : Error(ErrorKind::Range, what) {}
};

class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double estimate, double error_bound)
        : Error(ErrorKind::Integration, what), estimate_(estimate), error_bound_(error_bound) {}
    double estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

class CapabilityError : public Error {
public:
    explicit CapabilityError(const std::string& what) : Error(ErrorKind::Capability, what) {}
};

class ConfigError : public Error {
public:
    /// line == 0 means the error is semantic and not tied to one line.
    ConfigError(const std::string& what, int line, std::string key)
        : Error(ErrorKind::Config, what), line_(line), key_(std::move(key)) {}
    int line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    int line_;
    std::string key_;
};

}  // namespace rabi
