#pragma once

#include <iosfwd>

namespace monodromy::cli {

/// Runs one command line. Reports go to `out`, diagnostics to `err`.
/// Returns 0, or 1 (input), 2 (numerical failure), 3 (verification failure).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace monodromy::cli
