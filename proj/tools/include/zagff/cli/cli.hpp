#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "zagff/error.hpp"

namespace zagff::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int {
  kExitSuccess = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitRuntime = 3,
};

/// Bad flags, bad config values or unusable output paths. Maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  UsageError(std::string kind, const std::string& what) : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Fully resolved parameters of one invocation. Fields a command does not use
/// keep their defaults and are left out of its config.json.
struct ExperimentConfig {
  std::string command;
  int d = 3;
  std::vector<int> n_list;  // greens/verify may take several; extremes/sample use n_list.front()
  std::int64_t replicates = 0;
  std::uint64_t seed = 0;
  std::vector<double> deltas;
  double floor = -10.0;
  std::vector<int> split;
  double beta = 0.75;
  double laplace_c = 1.0;
  std::string format = "binary";
  std::filesystem::path out;
  bool force = false;
  bool inject_fault = false;

  int n() const { return n_list.front(); }
};

/// Parses argv (without the program name). Flags override values read from
/// --config; missing values take per-command defaults. Throws UsageError.
ExperimentConfig parse_args(const std::vector<std::string>& args);

/// Domain checks that run before any computation. Throws UsageError.
void validate(const ExperimentConfig& config);

/// The resolved config as written to config.json. Output location, overwrite
/// and fault-injection switches are not part of it.
Json config_json(const ExperimentConfig& config);

int cmd_greens(const ExperimentConfig& config, std::ostream& log);
int cmd_verify(const ExperimentConfig& config, std::ostream& log);
int cmd_extremes(const ExperimentConfig& config, std::ostream& log);
int cmd_sample(const ExperimentConfig& config, std::ostream& log);

/// Entry point shared by main() and the tests. Errors are reported on `err`
/// as a JSON object {"error": {"kind", "message"}}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// ---------------------------------------------------------------------------
// verify report schema
// ---------------------------------------------------------------------------

struct CheckResult {
  std::string group;
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct VerifyReport {
  int schema_version = kSchemaVersion;
  int d = 3;
  std::vector<int> n_list;
  bool fault_injected = false;
  std::vector<CheckResult> checks;
  bool all_passed = false;
};

Json to_json(const VerifyReport& report);
/// Throws UsageError("schema", ...) on missing or mistyped fields.
VerifyReport verify_report_from_json(const Json& j);

}  // namespace zagff::cli
