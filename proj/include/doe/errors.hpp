#pragma once

#include <stdexcept>
#include <string>

namespace doe {

// Malformed or inconsistent user input (files, flags). Maps to CLI exit 2.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Power-flow failed to converge. Maps to CLI exit 3.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace doe
