#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace textspot {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid or degenerate polygon input.
class GeometryError : public Error {
public:
    using Error::Error;
};

// Malformed input text. Carries the line (1-based) or byte offset when known.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what,
                        std::optional<std::size_t> line = std::nullopt,
                        std::optional<std::size_t> byte_offset = std::nullopt)
        : Error(what), line_(line), byte_offset_(byte_offset) {}

    std::optional<std::size_t> line() const noexcept { return line_; }
    std::optional<std::size_t> byte_offset() const noexcept { return byte_offset_; }

private:
    std::optional<std::size_t> line_;
    std::optional<std::size_t> byte_offset_;
};

// Well-formed document that does not follow the annotation schema.
class SchemaError : public ParseError {
public:
    SchemaError(const std::string& what, std::string field)
        : ParseError(what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class MatchingError : public Error {
public:
    using Error::Error;
};

class LexiconError : public Error {
public:
    using Error::Error;
};

}  // namespace textspot
