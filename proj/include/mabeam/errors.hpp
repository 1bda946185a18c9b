// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace mabeam {

// Invalid dimensions, malformed configuration files or bad CLI values.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerical failure inside a solver (singular system, failed factorization,
// degenerate input that leaves an update undefined).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreadable or unwritable path.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mabeam
