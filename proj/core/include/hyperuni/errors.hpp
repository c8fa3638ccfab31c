#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hyperuni {

/// Base class for all library errors that are not plain precondition failures.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A malformed input file. `line()` is 1-based; 0 means "no particular line".
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A configured resource cap (edge count, vertex count, enumeration size) would be exceeded.
class ResourceCapError : public Error {
public:
    using Error::Error;
};

/// An internal invariant was found broken. Always a bug.
class InvariantError : public Error {
public:
    using Error::Error;
};

}  // namespace hyperuni
