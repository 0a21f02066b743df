#pragma once

#include <filesystem>
#include <iosfwd>

#include "foam/config.hpp"

namespace foam {

// Command bodies shared by the CLI and the test suites. Each writes its
// outputs under cfg.out_dir (plus a fully-resolved config.json) and returns
// a process exit code: 0 ok, 2 config error, 3 non-convergence, 4 I/O.

int cmd_evolve(const RunConfig& cfg, std::ostream& log);
int cmd_search(const RunConfig& cfg, std::ostream& log);
int cmd_ramp(const RunConfig& cfg, std::ostream& log);
int cmd_analyze(const RunConfig& cfg, const std::filesystem::path& snapshot,
                std::ostream& log);
int cmd_export(const std::filesystem::path& snapshot,
               const std::filesystem::path& out, const std::string& format,
               std::ostream& log);

/// Maps foam::Error subclasses onto the documented exit codes.
int exit_code_for_current_exception();

}  // namespace foam
