#pragma once

#include <stdexcept>
#include <string>

namespace pcq {

// Raised for malformed inputs and violated preconditions. Callers at the
// process boundary map this to a user error (exit code 1, HTTP 4xx).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pcq
