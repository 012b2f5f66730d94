#pragma once

#include <stdexcept>
#include <string>

namespace mramrng {

// Precondition violation on a public operation (bad length, out-of-range
// probability, malformed octal string, unknown code triple...).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class CalibrationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// No test in the battery could run on the given input.
class EmptyBattery : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mramrng
