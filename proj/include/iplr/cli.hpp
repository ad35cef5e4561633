#pragma once

#include <iosfwd>

namespace iplr {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitBadInput = 1, kExitAborted = 2 };

/// Entry point of the `iplr` tool with subcommands generate, solve and
/// evaluate. Every flag can also be set through an environment variable
/// IPLR_<FLAG>, e.g. IPLR_CG_TOL for --cg-tol; the command line wins.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace iplr
