#pragma once

#include <stdexcept>
#include <string>

namespace endtag {

// Bad caller-supplied value (flag, parameter, shape mismatch).
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed input data (corpus files, model files).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace endtag
