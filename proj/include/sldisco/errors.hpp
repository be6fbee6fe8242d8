#pragma once

#include <stdexcept>

namespace sldisco {

// Malformed files, shape mismatches, out-of-range values.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numeric breakdowns: non-finite losses, singular conditioning systems.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sldisco
