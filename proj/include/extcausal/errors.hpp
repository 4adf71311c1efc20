#pragma once

#include <stdexcept>
#include <string>

namespace extcausal {

// Bad argument values: wrong sizes, out-of-range parameters, malformed specs.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Problems with user-supplied data: unreadable files, non-numeric cells,
// samples that violate the documented preconditions of a pipeline stage.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure inside an algorithm (non-finite objective values etc.).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace extcausal
