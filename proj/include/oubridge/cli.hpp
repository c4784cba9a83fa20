#pragma once

#include <iosfwd>

namespace oubridge {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitParse = 2,
    kExitUnsupported = 3,
    kExitNumerical = 4,
};

/// Entry point of `oubridge`; writes results to `out` unless --out is given.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace oubridge
