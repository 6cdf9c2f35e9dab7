// errors.hpp — Error categories shared across the library and the CLI exit-code map

#pragma once

#include <stdexcept>
#include <string>

namespace oqs {

// Invalid configuration / schema input (CLI maps this to exit code 2).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical breakdown at run time: non-finite values, failed solves,
// violated state invariants (CLI maps this to exit code 3).
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace oqs
