#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace extheat::cli {

/// Exit codes: 0 pass, 1 usage or configuration error, 2 experiment failed.
inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFail = 2;

int run(int argc, char** argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Runs one experiment from a resolved configuration and writes
/// <output_dir>/<name>.csv, <name>.json and manifest.json.
int execute(const std::string& experiment, const Config& cfg, std::ostream& out, std::ostream& err);

}  // namespace extheat::cli
