#include "output.hpp"

#include <cstdio>
#include <fstream>

namespace zagff::cli::detail {

namespace fs = std::filesystem;

void prepare_output_dir(const ExperimentConfig& config) {
  std::error_code ec;
  if (fs::exists(config.out, ec)) {
    if (!fs::is_directory(config.out, ec)) {
      throw UsageError("io", "output path exists and is not a directory: " + config.out.string());
    }
    if (!fs::is_empty(config.out, ec) && !config.force) {
      throw UsageError("io", "output directory is not empty (use --force): " + config.out.string());
    }
  }
  fs::create_directories(config.out, ec);
  if (ec) throw UsageError("io", "cannot create output directory " + config.out.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace zagff::cli::detail
