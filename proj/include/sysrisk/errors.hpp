#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sysrisk {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Input data violates a structural rule (panel shape, availability, ...).
class DataError : public Error {
public:
    using Error::Error;
};

/// Malformed CSV input. Row and column are 1-based; column 0 means the row as a whole.
class ParseError : public DataError {
public:
    ParseError(const std::string& what, std::size_t row, std::size_t column)
        : DataError("line " + std::to_string(row) +
                    (column > 0 ? ", column " + std::to_string(column) : std::string{}) + ": " +
                    what),
          row_(row),
          column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

/// A numerical procedure failed (non-convergence, degenerate region, bracket failure).
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double last_residual = 0.0)
        : Error(what), last_residual_(last_residual) {}

    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

/// An input violates a stated axiom or invariant; check() names it (e.g. "N1", "M").
class ValidationError : public Error {
public:
    ValidationError(const std::string& check, const std::string& what)
        : Error(check + ": " + what), check_(check) {}

    const std::string& check() const noexcept { return check_; }

private:
    std::string check_;
};

/// A file could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Invalid user configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace sysrisk
