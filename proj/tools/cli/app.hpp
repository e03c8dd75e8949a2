#pragma once

#include <iosfwd>

namespace hdch::cli {

/// Exit codes of the hdch tool.
enum ExitCode : int { kSuccess = 0, kUnexpected = 1, kConfigError = 2, kNumericalError = 3, kIoError = 4 };

/// Parses arguments, runs one subcommand and maps library errors to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hdch::cli
