#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace metagee {

/// Base for every error this library raises on bad input or geometry.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RingMismatch : public Error {
public:
    RingMismatch() : Error("ring mismatch") {}
};

/// Lexical or syntax error in the expression language.
class ParseError : public Error {
public:
    ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& message)
        : Error(message), offset_(offset), expected_(std::move(expected)) {}

    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }
    [[nodiscard]] const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

/// sqrt/ln/division evaluated outside their domain.
class DomainError : public Error {
public:
    DomainError(std::string subexpression, const std::string& message)
        : Error(message), subexpression_(std::move(subexpression)) {}

    [[nodiscard]] const std::string& subexpression() const noexcept { return subexpression_; }

private:
    std::string subexpression_;
};

/// A spec file that violates the schema, with a JSON-pointer style location.
class SpecError : public Error {
public:
    SpecError(std::string pointer, const std::string& message)
        : Error(pointer.empty() ? message : pointer + ": " + message), pointer_(std::move(pointer)) {}

    [[nodiscard]] const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

/// Degenerate immersion, boundary too close for finite differences, and
/// similar geometric failures.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// An identity requested on a fixture that does not meet its hypotheses.
class NotApplicable : public Error {
public:
    using Error::Error;
};

} // namespace metagee
