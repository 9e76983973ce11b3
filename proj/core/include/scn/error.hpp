#pragma once

#include <stdexcept>
#include <string>

namespace scn {

/// Bad input data: malformed files, shape mismatches, violated invariants.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller misuse of an API or CLI: bad arguments, out-of-range parameters.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace scn
