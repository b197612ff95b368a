#pragma once

#include <stdexcept>
#include <string>

namespace ptpsim {

// Encoding a message that violates its own invariants (body/type mismatch,
// out-of-range timestamp fields, dishonest messageLength).
struct InvariantViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// Reading a virtual clock before its current anchor.
struct TimeReversal : std::logic_error {
    using std::logic_error::logic_error;
};

// Requested rate correction beyond the configured slew cap.
struct SlewCapExceeded : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Signed 64-bit nanosecond arithmetic left its domain.
struct ArithmeticOverflow : std::overflow_error {
    using std::overflow_error::overflow_error;
};

// Inverting a clock mapping with non-positive slope.
struct Unreachable : std::logic_error {
    using std::logic_error::logic_error;
};

// A scenario that fails validation at run time.
struct ScenarioInvalid : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// The simulator's own ordering guarantees were broken; always a bug.
struct InternalInvariantBreach : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace ptpsim
