#include <ostream>

#include "parse.hpp"
#include "zagff/cli/cli.hpp"

namespace zagff::cli {

namespace {

void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
  Json j;
  j["error"] = {{"kind", kind}, {"message", message}};
  err << j.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  try {
    std::string help;
    auto parsed = detail::parse_or_help(args, help);
    if (!parsed) {
      out << help;
      return kExitSuccess;
    }
    config = std::move(*parsed);
    validate(config);
  } catch (const UsageError& e) {
    report_error(err, e.kind(), e.what());
    return kExitUsage;
  }
  try {
    if (config.command == "greens") return cmd_greens(config, out);
    if (config.command == "verify") return cmd_verify(config, out);
    if (config.command == "extremes") return cmd_extremes(config, out);
    return cmd_sample(config, out);
  } catch (const UsageError& e) {
    report_error(err, e.kind(), e.what());
    return kExitUsage;
  } catch (const Error& e) {
    report_error(err, std::string(to_string(e.kind())), e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    report_error(err, "internal", e.what());
    return kExitRuntime;
  }
}

}  // namespace zagff::cli
