#pragma once

#include <string>
#include <vector>

namespace platelab {

/// Experiment driver: dispatches subcommands, writes CSV artifacts and a run
/// manifest. Returns the process exit code (0 ok, 2 config error, 3 numerical
/// failure).
int run_cli(const std::vector<std::string>& args);

}  // namespace platelab
