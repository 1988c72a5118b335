#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli/config.hpp"
#include "extheat/io.hpp"

namespace extheat::cli {

struct Outcome {
  bool pass = false;
  nlohmann::json report;
  CsvTable table{{"t", "value", "bound", "target"}};
};

struct OptionSpec {
  std::string key;   // config key, "section.name"
  std::string flag;  // command-line flag, "--name"
  std::string help;
};

struct CommandSpec {
  std::string name;
  std::string help;
  std::vector<OptionSpec> options;  // experiment-specific
  Outcome (*execute)(const Config&);
};

/// Options shared by every experiment (domain, boundary condition, solver,
/// output).
const std::vector<OptionSpec>& common_options();

const std::vector<CommandSpec>& experiments();

/// Throws ConfigError for an unknown experiment name.
const CommandSpec& find_experiment(const std::string& name);

/// Every key the configuration may carry, for rejecting typos.
bool is_known_key(const std::string& key);

}  // namespace extheat::cli
