#pragma once

#include <stdexcept>
#include <string>

namespace pspin {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An exhaustive computation was requested beyond its enumeration budget.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quadrature or root finding did not reach the requested accuracy.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed configuration file or flag value.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PatternIoErrc {
    io_failure,
    bad_magic,
    bad_version,
    truncated,
    invalid_payload,
};

class PatternIoError : public std::runtime_error {
public:
    PatternIoError(PatternIoErrc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    PatternIoErrc code() const noexcept { return code_; }

private:
    PatternIoErrc code_;
};

} // namespace pspin
