#pragma once

#include <iosfwd>

namespace torwave::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kOk = 0,
    kAssertionFailed = 1,  // an acceptance preset failed
    kInvalidArgument = 2,
    kNumericFailure = 3,
};

/// Parses argv and runs one command. Results go to `out` (or the --out file),
/// diagnostics to `err` as a single line.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace torwave::cli
