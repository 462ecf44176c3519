#pragma once

#include <iosfwd>

namespace cevi::tools {

// Runs the built-in invariant battery, printing one pass/fail line per check.
// Returns 0 when everything passes.
int run_selftest(std::ostream& out);

}  // namespace cevi::tools
