#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scalazone::cli {

/// Exit codes: 0 success, 1 runtime or numeric failure, 2 usage or
/// validation error.
enum ExitCode : int { kOk = 0, kRuntimeFailure = 1, kUsageError = 2 };

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses a population list such as `1,2,5`, `1..100` or `1..100:10`.
std::vector<int> parse_population_list(const std::string& text);

}  // namespace scalazone::cli
