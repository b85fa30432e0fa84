#pragma once

#include <stdexcept>
#include <string>

namespace p2psim {

// Bad input data: malformed files, violated invariants, out-of-range arguments.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Failures while a run or training loop is executing (non-finite losses,
// horizon overruns).
class RuntimeFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace p2psim
