#pragma once

#include <stdexcept>

namespace pathgrad {

// Invalid input or configuration. The CLI maps this to exit code 2.
class input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numeric breakdown (non-finite values mid-computation). CLI exit code 3.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pathgrad
