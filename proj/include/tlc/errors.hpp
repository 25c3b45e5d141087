#pragma once

#include <stdexcept>
#include <string>

namespace tlc {

// Invalid argument outside an operation's domain (v = 0 for gamma, bad distribution, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// The packed code does not fit into the requested number of bits.
struct CapacityExceeded : std::length_error {
    using std::length_error::length_error;
};

// An exhaustive computation was requested beyond its guarded size.
struct ScaleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mismatched vector or matrix dimensions.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A proven structural bound (list length, recursion depth, rejection count) was violated.
struct BoundViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// Malformed serialized input.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tlc
