#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fpp::cli {

/// Exit codes: 0 success, 1 validation failure, 2 runtime failure. Errors are
/// written to `err` as a single-line JSON object.
enum ExitCode : int { kSuccess = 0, kValidation = 1, kRuntime = 2 };

/// Runs one command line; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fpp::cli
