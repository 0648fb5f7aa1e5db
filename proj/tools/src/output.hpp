#pragma once

#include <filesystem>
#include <string>

#include "zagff/cli/cli.hpp"

namespace zagff::cli::detail {

/// Creates the invocation directory. A non-empty existing directory is
/// refused unless --force was given.
void prepare_output_dir(const ExperimentConfig& config);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& j);

/// Round-trip formatting, 17 significant digits.
std::string fmt(double v);

}  // namespace zagff::cli::detail
