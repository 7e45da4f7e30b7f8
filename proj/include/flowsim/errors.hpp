#pragma once

#include <stdexcept>
#include <string>

namespace flowsim {

// Invalid user-supplied configuration (bad rates, malformed config files, ...).
// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// An internal consistency check failed (broken precondition, state corruption).
// The CLI maps this to exit code 3.
class InvariantError : public std::logic_error {
public:
    explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace flowsim
