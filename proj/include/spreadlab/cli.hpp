#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spreadlab/io.hpp"

namespace spreadlab::cli {

/// Process exit codes.
enum ExitCode : int {
  kSuccess = 0,             // success, or the theorem holds
  kConclusionViolated = 1,  // a witness node was found
  kInputError = 2,          // unreadable, malformed or invalid input
  kInfeasible = 3,          // no consistent price system, or a hypothesis fails
};

struct CommandResult {
  int exit_code = kSuccess;
  std::optional<std::filesystem::path> report_path;
  std::string human_summary;
  /// The machine report, also written to report_path when one is set.
  io::Json report;
};

/// Parses and runs one subcommand; args exclude the program name. Never
/// throws: every failure maps to an exit code and a summary line.
CommandResult run_command(const std::vector<std::string>& args);

}  // namespace spreadlab::cli
