#ifndef PIE_COMMANDS_HPP
#define PIE_COMMANDS_HPP

#include <optional>
#include <string>

#include "pie/problem.hpp"

namespace pie {

struct RunOptions {
  std::optional<std::string> csv_out;  // directory for CSV side outputs
  bool with_timing = true;
};

struct RunResult {
  json report;
  int exit_code = 0;  // 0 success, 2 obstructed solvability
};

/// Dispatches one CLI command onto the solver stack and assembles the
/// machine-readable report. Validation problems throw ValidationError.
RunResult run_command(const std::string& command, const ProblemFile& problem,
                      const RunOptions& options = {});

}  // namespace pie

#endif
