#pragma once

#include <stdexcept>
#include <string>

namespace mpar {

struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct parameter_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct contract_error : std::logic_error {
    using std::logic_error::logic_error;
};

struct capacity_error : std::length_error {
    using std::length_error::length_error;
};

// Raised when a protocol state machine observes a state its rules declare
// unreachable. A run that throws this is a simulator bug, not a routing outcome.
struct invariant_fault : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace mpar
