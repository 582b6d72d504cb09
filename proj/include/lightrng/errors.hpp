#pragma once

#include <stdexcept>
#include <string>

namespace lightrng {

/// Thrown when a caller violates a documented precondition.
class ContractError : public std::invalid_argument {
public:
    explicit ContractError(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when a tail bound is requested outside its validity region
/// (deviation on the wrong side of the mean).
class RegimeError : public std::domain_error {
public:
    explicit RegimeError(const std::string& what) : std::domain_error(what) {}
};

/// Thrown on malformed input files (config, seed, streams).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace lightrng
