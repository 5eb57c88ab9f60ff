#pragma once

#include <iosfwd>

#include <json.hpp>

namespace ovsafe {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitUsage = 2 };

/// Built-in configuration; every key a config file may set.
nlohmann::json default_config();

/// Overlay `file` on the defaults. Unknown keys throw std::invalid_argument.
nlohmann::json resolve_config(const nlohmann::json& file);

/// Entry point of the `ovsafe` tool. Never throws; returns 0, 1 or 2.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ovsafe
