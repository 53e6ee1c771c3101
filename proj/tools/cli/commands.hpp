#pragma once

#include "config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace natanzon::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalError = 3, kStrictViolation = 4 };

struct CommandOptions {
    std::filesystem::path out_dir;
    bool strict = false;
};

inline const std::vector<std::string> kCommands{"potential", "spectrum", "wavefunctions", "verify", "algebra-check", "sweep"};

/// Runs one subcommand and maps failures to exit codes: configuration
/// problems give 2, numerical stage failures 3, and --strict threshold
/// violations 4. Diagnostics go to `err`, progress lines to `log`.
int run_command(const std::string& name, const RunConfig& cfg, const CommandOptions& opt, std::ostream& log,
                std::ostream& err);

/// Worker count for sweeps: NATANZON_THREADS if set to a positive integer,
/// otherwise the hardware concurrency.
unsigned sweep_threads();

}  // namespace natanzon::cli
