#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace klmi {

/// Argument outside the mathematical domain of an operation (bad h, k > n, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Inconsistent array shapes, e.g. ragged feature vectors.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A distance matrix that is not a valid dissimilarity matrix.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(const std::string& what, std::size_t row, std::size_t col)
        : std::invalid_argument(what + " at (" + std::to_string(row) + ", " +
                                std::to_string(col) + ")"),
          row_(row),
          col_(col) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t col() const noexcept { return col_; }

private:
    std::size_t row_;
    std::size_t col_;
};

/// Malformed input file. `line()` is 1-based; 0 when the file as a whole is at fault.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Bad command-line usage or an unknown output format.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace klmi
