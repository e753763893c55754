#pragma once

#include <stdexcept>
#include <string>

namespace resparse {

// Malformed or out-of-domain input (bad file, bad parameter). CLI exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A documented guarantee was violated at runtime (leverage provider
// overshoot, buffer bound, illegal game move). CLI exit code 1.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Iterative solve failed to reach tolerance within its iteration cap.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problem too large for a dense O(n^3) routine.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace resparse
