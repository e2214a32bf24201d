#pragma once

#include <stdexcept>
#include <string>

namespace tizx {

// Bad or unsupported configuration (unsupported m_rx, malformed config file).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller handed in data that violates an operation's precondition.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A coefficient set that fails the design constraints where feasibility is required.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tizx
