#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "intentflow/core/types.hpp"

namespace intentflow::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,    // usage or configuration error; nothing was run
    kExitPartial = 2,  // finished, but some items failed or were skipped
};

/// Entry point shared by the binary and the tests. `args[0]` is the program
/// name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Every trace file (`*.json`) under `dir`, sorted by file name. Unreadable
/// files are reported in `errors`.
std::vector<PipelineTrace> load_traces(const std::filesystem::path& dir, std::vector<std::string>& errors);

}  // namespace intentflow::cli
