// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace afc {

// Invalid user-facing input: bad config keys, out-of-range parameters,
// mismatched grids, malformed files. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A computation produced or detected non-finite values, or a numeric
// precondition failed at run time. Maps to CLI exit code 3.
class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace afc
