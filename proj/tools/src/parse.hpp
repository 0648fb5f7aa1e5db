#pragma once

#include <optional>
#include <string>
#include <vector>

#include "zagff/cli/cli.hpp"

namespace zagff::cli::detail {

/// nullopt with `help` filled when --help was requested.
std::optional<ExperimentConfig> parse_or_help(const std::vector<std::string>& args, std::string& help);

}  // namespace zagff::cli::detail
