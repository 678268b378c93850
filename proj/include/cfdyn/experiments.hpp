#pragma once

#include <vector>

#include "cfdyn/record.hpp"

namespace cfdyn {

/// Subcommand names in the order they are listed by the CLI.
const std::vector<std::string>& subcommands();

/// Fills subcommand defaults and checks that required fields are present and
/// in range. Throws ConfigError.
ExperimentConfig resolve(const ExperimentConfig& c);

/// Runs one experiment on a resolved config. Records carry the config echo;
/// wall_clock_s is set only when c.timing is true.
std::vector<ResultRecord> run(const ExperimentConfig& c);

}  // namespace cfdyn
