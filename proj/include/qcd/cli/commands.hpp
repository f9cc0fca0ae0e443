#pragma once

#include <string>

#include "qcd/cli/config.hpp"

namespace qcd::cli {

enum ExitCode : int {
  kExitPass = 0,
  kExitVerificationFailed = 1,
  kExitConfigError = 2,
  kExitNumericalFailure = 3,
};

struct CommandOutcome {
  int exit_code = kExitPass;
  Json report;          // null when no report could be produced
  std::string message;  // one line for stderr
};

// Commands: verify-duality, solve-bethe, rs-evolve, check-identities.
// Never throws; every failure is mapped to an exit code.
CommandOutcome run_command(const std::string& command, const Json& config, const Overrides& overrides);

// Loads the config file (empty path: defaults only) and runs.
CommandOutcome run_command_file(const std::string& command, const std::string& config_path,
                                const Overrides& overrides);

bool is_known_command(const std::string& command);

}  // namespace qcd::cli
