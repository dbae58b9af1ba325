#pragma once

#include <stdexcept>
#include <string>

namespace nbrw {

// Bad argument or precondition violation (maps to exit code 1 in the CLI).
struct domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A run would exceed a configured resource limit (maps to exit code 3).
struct capacity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file.
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A derived constant left the representable range (e.g. schedule underflow).
struct scale_infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace nbrw
