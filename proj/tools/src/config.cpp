#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "parse.hpp"
#include "zagff/cli/cli.hpp"
#include "zagff/lattice.hpp"

namespace zagff::cli {

namespace {

struct Flags {
  int d = 0;
  int n = 0;
  std::vector<int> n_list;
  std::int64_t replicates = 0;
  std::uint64_t seed = 0;
  std::vector<double> deltas;
  double floor = 0.0;
  std::string split;
  double beta = 0.0;
  double laplace_c = 0.0;
  std::string format;
  std::string out;
  std::string config;
  bool force = false;
  bool inject_fault = false;
};

std::vector<int> parse_split(std::string text) {
  const std::string original = text;
  std::replace(text.begin(), text.end(), 'x', ',');
  std::vector<int> parts;
  std::istringstream in(text);
  std::string piece;
  while (std::getline(in, piece, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stoi(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw UsageError("invalid-argument", "cannot parse split '" + original + "'");
    }
  }
  return parts;
}

template <typename T>
T json_get(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw UsageError("invalid-config", std::string("config key '") + key + "' has the wrong type");
  }
}

void apply_file(ExperimentConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("io", "cannot open config file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("invalid-config", std::string("config file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("invalid-config", "config file must hold a JSON object");
  static const char* known[] = {"command", "schema_version", "d",     "n",    "n_list", "replicates", "seed",
                                "deltas",  "floor",          "split", "beta", "laplace_c", "format"};
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw UsageError("invalid-config", "unknown config key '" + key + "'");
  }
  if (j.contains("command") && json_get<std::string>(j, "command") != c.command) {
    throw UsageError("invalid-config", "config file was written for command '" + j["command"].get<std::string>() + "'");
  }
  if (j.contains("d")) c.d = json_get<int>(j, "d");
  if (j.contains("n")) c.n_list = {json_get<int>(j, "n")};
  if (j.contains("n_list")) c.n_list = json_get<std::vector<int>>(j, "n_list");
  if (j.contains("replicates")) c.replicates = json_get<std::int64_t>(j, "replicates");
  if (j.contains("seed")) c.seed = json_get<std::uint64_t>(j, "seed");
  if (j.contains("deltas")) c.deltas = json_get<std::vector<double>>(j, "deltas");
  if (j.contains("floor")) c.floor = json_get<double>(j, "floor");
  if (j.contains("split")) {
    c.split = j["split"].is_string() ? parse_split(j["split"].get<std::string>()) : json_get<std::vector<int>>(j, "split");
  }
  if (j.contains("beta")) c.beta = json_get<double>(j, "beta");
  if (j.contains("laplace_c")) c.laplace_c = json_get<double>(j, "laplace_c");
  if (j.contains("format")) c.format = json_get<std::string>(j, "format");
}

void set_defaults(ExperimentConfig& c) {
  if (c.command == "greens") {
    c.n_list = {4, 8, 16, 32};
  } else if (c.command == "verify") {
    c.n_list = {4, 5};
  } else if (c.command == "extremes") {
    c.n_list = {24};
    c.replicates = 2000;
    c.deltas = {0.0};
  } else if (c.command == "sample") {
    c.n_list = {8};
    c.replicates = 1;
  }
}

}  // namespace

std::optional<ExperimentConfig> detail::parse_or_help(const std::vector<std::string>& args, std::string& help) {
  CLI::App app{"zero-average Gaussian free field on the discrete torus", "zagff"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Expand all help");
  Flags f;
  struct Bound {
    CLI::App* sub;
    std::map<std::string, CLI::Option*> opts;
  };
  std::vector<Bound> subs;
  auto add = [&](const std::string& name, const std::string& description, bool n_list, bool replicates,
                 bool experiment, bool format, bool fault) {
    Bound b{app.add_subcommand(name, description), {}};
    auto* s = b.sub;
    b.opts["d"] = s->add_option("--d", f.d, "dimension (>= 3), default 3");
    b.opts["n"] = s->add_option("--n", f.n, "torus side length");
    if (n_list) b.opts["n-list"] = s->add_option("--n-list", f.n_list, "comma-separated side lengths")->delimiter(',');
    if (replicates) b.opts["replicates"] = s->add_option("--replicates,-M", f.replicates, "number of sampled fields");
    b.opts["seed"] = s->add_option("--seed", f.seed, "master seed, default 0");
    if (experiment || format) {
      b.opts["floor"] = s->add_option("--floor", f.floor, "point pattern storage floor, default -10");
    }
    if (experiment) {
      b.opts["deltas"] = s->add_option("--delta,--deltas", f.deltas, "threshold levels, default 0")->delimiter(',');
      b.opts["split"] = s->add_option("--split", f.split, "cell split such as 2x1x1, default 2x1x..x1");
      b.opts["beta"] = s->add_option("--beta", f.beta, "bulk region exponent, default 0.75");
      b.opts["laplace-c"] = s->add_option("--laplace-c", f.laplace_c, "height of the Laplace test function, default 1");
    }
    if (format) {
      b.opts["format"] = s->add_option("--format", f.format, "binary or csv, default binary")
                             ->check(CLI::IsMember({"binary", "csv"}));
    }
    b.opts["out"] = s->add_option("--out,-o", f.out, "output directory");
    b.opts["config"] = s->add_option("--config", f.config, "JSON config file; flags override it");
    b.opts["force"] = s->add_flag("--force", f.force, "allow writing into a non-empty output directory");
    if (fault) b.opts["inject-fault"] = s->add_flag("--inject-fault", f.inject_fault)->group("");
    subs.push_back(std::move(b));
  };
  add("greens", "Green's function tables, convergence of v_n and decay profiles", true, false, false, false, false);
  add("verify", "exact identity checks on small tori", true, false, false, false, true);
  add("extremes", "Gumbel, Poisson, Laplace and boundary experiments", false, true, true, false, false);
  add("sample", "write sampled fields and their point patterns", false, true, false, true, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    help = app.help();
    return std::nullopt;
  } catch (const CLI::CallForAllHelp&) {
    help = app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError("usage", e.what());
  }

  const Bound* chosen = nullptr;
  for (const auto& b : subs) {
    if (b.sub->parsed()) chosen = &b;
  }
  ExperimentConfig c;
  c.command = chosen->sub->get_name();
  set_defaults(c);
  auto given = [&](const char* name) {
    auto it = chosen->opts.find(name);
    return it != chosen->opts.end() && it->second->count() > 0;
  };
  if (given("config")) apply_file(c, f.config);
  if (given("d")) c.d = f.d;
  if (given("n") && given("n-list")) throw UsageError("usage", "--n and --n-list are mutually exclusive");
  if (given("n")) c.n_list = {f.n};
  if (given("n-list")) c.n_list = f.n_list;
  if (given("replicates")) c.replicates = f.replicates;
  if (given("seed")) c.seed = f.seed;
  if (given("deltas")) c.deltas = f.deltas;
  if (given("floor")) c.floor = f.floor;
  if (given("split")) c.split = parse_split(f.split);
  if (given("beta")) c.beta = f.beta;
  if (given("laplace-c")) c.laplace_c = f.laplace_c;
  if (given("format")) c.format = f.format;
  c.force = f.force;
  c.inject_fault = f.inject_fault;
  if (c.command == "extremes" && c.split.empty()) {
    c.split.assign(static_cast<std::size_t>(std::max(c.d, 1)), 1);
    c.split.front() = 2;
  }
  c.out = given("out") ? std::filesystem::path(f.out)
                       : std::filesystem::path("zagff-" + c.command + "-seed" + std::to_string(c.seed));
  return c;
}

ExperimentConfig parse_args(const std::vector<std::string>& args) {
  std::string help;
  auto c = detail::parse_or_help(args, help);
  if (!c) throw UsageError("usage", "help requested");
  return *c;
}

void validate(const ExperimentConfig& c) {
  if (c.d < 3) {
    throw UsageError("unsupported-dimension", "d = " + std::to_string(c.d) + ": the zero-average field needs d >= 3");
  }
  if (c.n_list.empty()) throw UsageError("invalid-argument", "no side length given");
  for (int n : c.n_list) {
    if (n < 3) throw UsageError("invalid-argument", "side length n must be >= 3");
    try {
      FieldConfig cfg(c.d, n);
      (void)cfg;
    } catch (const Error& e) {
      throw UsageError(std::string(to_string(e.kind())), e.what());
    }
  }
  if (c.command != "greens" && c.command != "verify" && c.n_list.size() != 1) {
    throw UsageError("invalid-argument", c.command + " takes a single --n");
  }
  if (c.command == "verify") {
    for (int n : c.n_list) {
      if (n > 12) throw UsageError("invalid-argument", "verify runs exact dense solves; use n <= 12");
    }
  }
  if (c.command == "extremes") {
    if (c.replicates < 100) throw UsageError("invalid-argument", "extremes needs --replicates >= 100");
    if (c.deltas.empty()) throw UsageError("invalid-argument", "at least one delta is required");
    for (double delta : c.deltas) {
      if (!std::isfinite(delta)) throw UsageError("invalid-argument", "delta must be finite");
      if (!(delta > c.floor)) throw UsageError("invalid-argument", "every delta must exceed the floor");
    }
    if (!std::isfinite(c.floor)) throw UsageError("invalid-argument", "floor must be finite");
    if (static_cast<int>(c.split.size()) != c.d) {
      throw UsageError("dimension-mismatch", "split needs one entry per dimension");
    }
    for (int p : c.split) {
      if (p < 1 || c.n() % p != 0) throw UsageError("invalid-argument", "split parts must divide n");
    }
    if (!(c.beta > 0.0 && c.beta < 1.0)) throw UsageError("invalid-argument", "beta must lie in (0, 1)");
    if (!std::isfinite(c.laplace_c) || c.laplace_c < 0.0) {
      throw UsageError("invalid-argument", "laplace-c must be a finite nonnegative number");
    }
  }
  if (c.command == "sample" && c.replicates < 1) throw UsageError("invalid-argument", "--replicates must be >= 1");
}

Json config_json(const ExperimentConfig& c) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = c.command;
  j["d"] = c.d;
  if (c.command == "greens" || c.command == "verify") {
    j["n_list"] = c.n_list;
  } else {
    j["n"] = c.n();
    j["replicates"] = c.replicates;
    j["seed"] = c.seed;
  }
  if (c.command == "extremes") {
    j["deltas"] = c.deltas;
    j["floor"] = c.floor;
    j["split"] = c.split;
    j["beta"] = c.beta;
    j["laplace_c"] = c.laplace_c;
  }
  if (c.command == "sample") {
    j["floor"] = c.floor;
    j["format"] = c.format;
  }
  return j;
}

}  // namespace zagff::cli
