#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace apify {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  exit_ok = 0,
  exit_error = 1,
  exit_frontend = 2,
  exit_selector = 3,
  exit_path_budget = 4,
  exit_verify = 5,
};

/// Runs one command. `args` excludes the program name. Output is written to
/// `out` in one piece once the command has finished; diagnostics go to `err`.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace apify
