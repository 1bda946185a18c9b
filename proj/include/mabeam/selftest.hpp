// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <ostream>

namespace mabeam {

// Compact built-in consistency checks (manifold duality, channel assembly,
// solver update identities, sparse-solver agreement, objective descent).
// Prints one line per check; returns true when everything passed.
bool selftest(std::ostream& os, std::uint64_t seed);

}  // namespace mabeam
