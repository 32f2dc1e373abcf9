#pragma once

#include <stdexcept>

namespace trucedyn {

// Rejected inputs or violated type invariants. The message starts with the
// offending field (e.g. "payoffs.R: ..."), so config errors point at the key.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Failures of the numeric machinery itself: tripped step-size guards,
// degenerate densities, brackets that refuse to close.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace trucedyn
