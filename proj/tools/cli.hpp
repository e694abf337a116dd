#pragma once

#include <ostream>

namespace tsadforge {

/// Entry point behind the `tsadforge` binary. Returns 0 on success, 1 on
/// usage or configuration errors, 2 on runtime failures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tsadforge
