#pragma once

#include <ostream>

namespace qwalk {

// Runs a fast invariant suite, printing one line per check. Returns 0 when
// every check passes and 3 otherwise.
int run_selftest(std::ostream& out);

}  // namespace qwalk
