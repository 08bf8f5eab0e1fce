#pragma once

#include <ostream>

namespace stablewalk::cli {

// Quick identity checks across every module; prints one line each and returns true when all pass.
bool run_selftest(std::ostream& out);

} // namespace stablewalk::cli
