// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rsr/cli/config.hpp"

namespace rsr::cli {

enum ExitCode : int { kOk = 0, kInternalError = 1, kInputError = 2 };

/// Parses `args` (without the program name) and runs the chosen subcommand.
/// The main report goes to `out` unless an output directory is configured;
/// diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Runs an already-resolved configuration.
int run_command(RunConfig cfg, std::ostream& out, std::ostream& err);

} // namespace rsr::cli
