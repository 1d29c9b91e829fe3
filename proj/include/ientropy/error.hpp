#pragma once

#include <stdexcept>
#include <string>

namespace ientropy {

// Input text that cannot be decoded: bad header, wrong field count,
// unparseable number or timestamp.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(std::string message) : std::runtime_error(std::move(message)) {}
};

// Decoded data that violates a domain rule: non-positive quantity or price,
// timestamp regression, weights that make no sense.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::string message) : std::runtime_error(std::move(message)) {}
};

} // namespace ientropy
