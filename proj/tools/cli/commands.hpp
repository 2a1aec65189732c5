#pragma once

#include "config.hpp"
#include "verify.hpp"

#include <ostream>

namespace liecrb::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitUsage = 2,
  kExitSingularInformation = 3,
  kExitSimulation = 4,
  kExitDominanceViolated = 5,
};

// Each command writes its report to config.out (or `out` when unset) and
// human-readable diagnostics to `err`, and returns the exit code.
// Configuration errors surface as InvalidArgument for the caller to map to kExitUsage.

int cmd_verify(const CliConfig& config, Fault fault, std::ostream& out, std::ostream& err);
int cmd_bound(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const CliConfig& config, std::ostream& out, std::ostream& err);
int cmd_compare(const CliConfig& config, std::ostream& out, std::ostream& err);

/// Flips each column so its largest-magnitude entry is positive.
Eigen::MatrixXd sign_normalized(Eigen::MatrixXd columns);

}  // namespace liecrb::cli
