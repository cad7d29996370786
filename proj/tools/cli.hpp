#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hartree::cli {

/// Stable exit codes.
enum ExitCode : int { kSuccess = 0, kVerificationFailure = 1, kUsageError = 2, kNumericalAbort = 3 };

/// Runs one command line (without the program name) and returns its exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hartree::cli
