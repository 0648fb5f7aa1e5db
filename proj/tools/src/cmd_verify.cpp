#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "output.hpp"
#include "zagff/greens.hpp"
#include "zagff/sampler.hpp"

namespace zagff::cli {

namespace {

constexpr double kTorusTolerance = 1e-8;
constexpr double kZdTolerance = 1e-5;
constexpr double kFaultSize = 1e-3;

void add(VerifyReport& report, std::string group, std::string name, double residual, double tolerance) {
  report.checks.push_back({std::move(group), std::move(name), residual, tolerance, residual <= tolerance});
}

std::vector<Coord> filled(int d, Coord v) { return std::vector<Coord>(static_cast<std::size_t>(d), v); }

// max_x |G(x) - (P G)(x) - (1{x=0} - 1/N)|
double poisson_residual(const GreenTable& table) {
  const auto& cfg = table.config();
  const int d = cfg.d();
  const int n = cfg.n();
  const double inv_n = 1.0 / static_cast<double>(cfg.sites());
  std::vector<Coord> c(static_cast<std::size_t>(d));
  double worst = 0.0;
  for (std::int64_t idx = 0; idx < cfg.sites(); ++idx) {
    site_coords(idx, cfg, c);
    double avg = 0.0;
    for (int j = 0; j < d; ++j) {
      for (int s : {1, -1}) {
        auto nb = c;
        nb[static_cast<std::size_t>(j)] = (nb[static_cast<std::size_t>(j)] + s + n) % n;
        avg += table.at(TorusPoint(nb, cfg));
      }
    }
    avg /= 2.0 * d;
    const double rhs = (idx == 0 ? 1.0 : 0.0) - inv_n;
    worst = std::max(worst, std::abs(table.at_index(idx) - avg - rhs));
  }
  return worst;
}

double torus_markov_residual(const GreenTable& table, const Region& region) {
  const auto& cfg = table.config();
  const int d = cfg.d();
  const int n = cfg.n();
  std::vector<TorusPoint> probes;
  for (Coord v : {Coord{0}, Coord{1}, Coord{n / 2}, Coord{n - 1}}) probes.emplace_back(filled(d, v), cfg);
  auto mixed = filled(d, 0);
  mixed[0] = 1;
  probes.emplace_back(mixed, cfg);
  double worst = 0.0;
  for (const auto& x : probes) {
    for (const auto& y : probes) worst = std::max(worst, verify_markov_decomposition_torus(table, region, x, y));
  }
  return worst;
}

}  // namespace

int cmd_verify(const ExperimentConfig& config, std::ostream& log) {
  detail::prepare_output_dir(config);
  VerifyReport report;
  report.d = config.d;
  report.n_list = config.n_list;
  report.fault_injected = config.inject_fault;
  const int d = config.d;

  for (int n : config.n_list) {
    const FieldConfig cfg(d, n);
    const std::string tag = "n=" + std::to_string(n);
    GreenTable table = zero_average_green(cfg);
    if (config.inject_fault) table = table.with_origin_offset(kFaultSize);

    add(report, "torus-green", "poisson-equation " + tag, poisson_residual(table), kTorusTolerance);
    double sum = 0.0;
    for (double v : table.values()) sum += v;
    add(report, "torus-green", "zero-average " + tag, std::abs(sum), kTorusTolerance);

    std::vector<std::pair<std::string, Region>> regions;
    regions.emplace_back("box[1,2]", Region::torus_box(cfg, LatticePoint(filled(d, 1)), LatticePoint(filled(d, 2))));
    regions.emplace_back("box[1,n-2]",
                         Region::torus_box(cfg, LatticePoint(filled(d, 1)), LatticePoint(filled(d, n - 2))));
    regions.emplace_back("complement{0}", Region::torus_complement(cfg, {TorusPoint(filled(d, 0), cfg)}));
    for (const auto& [label, region] : regions) {
      add(report, "markov-decomposition-torus", label + " " + tag, torus_markov_residual(table, region),
          kTorusTolerance);
    }

    const Region box = Region::torus_box(cfg, LatticePoint(filled(d, 1)), LatticePoint(filled(d, n - 2)));
    const KilledGreenSolve solve(box);
    const double exit_time = solve.expected_exit_time(filled(d, n / 2));
    const double bound = exit_time_bound(n, d);
    add(report, "exit-time-bound", "E[T_V] - (n*sqrt(d)+2)^2 " + tag, std::max(0.0, exit_time - bound), 0.0);

    const SpectralSampler sampler(cfg);
    add(report, "sampler", "site-variance " + tag, std::abs(sampler.site_variance() - table.origin()),
        kTorusTolerance);
    double worst_sum = 0.0;
    for (std::uint64_t s = 0; s < 16; ++s) {
      const auto field = sampler.sample(SeedPolicy{config.seed}.derive(s));
      double total = 0.0;
      double peak = 0.0;
      for (double v : field.values) {
        total += v;
        peak = std::max(peak, std::abs(v));
      }
      worst_sum = std::max(worst_sum, std::abs(total) / (static_cast<double>(cfg.sites()) * peak));
    }
    add(report, "sampler", "zero-sum/(N*max|psi|) " + tag, worst_sum, 1e-9);
  }

  GreenZdCache green;
  const auto origin = LatticePoint::origin(d);
  auto e1 = origin;
  e1[0] = 1;
  auto far = origin;
  far[0] = 3;
  auto diag = origin;
  diag[0] = 1;
  diag[1] = 1;
  const std::vector<std::pair<std::string, Region>> zd_regions = {
      {"l1-ball(1)", Region::l1_ball(origin, 1)},
      {"linf-ball(1)", Region::linf_ball(origin, 1)},
  };
  for (const auto& [label, region] : zd_regions) {
    double worst = 0.0;
    for (const auto& x : {origin, e1}) {
      for (const auto& y : {origin, e1, diag, far}) {
        worst = std::max(worst, verify_spatial_markov_zd(region, x, y, green));
      }
    }
    add(report, "spatial-markov-zd", label, worst, kZdTolerance);
  }

  report.all_passed = std::all_of(report.checks.begin(), report.checks.end(), [](const auto& c) { return c.passed; });

  std::ostringstream csv;
  csv << "group,name,residual,tolerance,passed\n";
  for (const auto& c : report.checks) {
    csv << c.group << ',' << c.name << ',' << detail::fmt(c.residual) << ',' << detail::fmt(c.tolerance) << ','
        << (c.passed ? 1 : 0) << '\n';
    log << (c.passed ? "PASS " : "FAIL ") << c.group << ": " << c.name << " residual=" << detail::fmt(c.residual)
        << '\n';
  }
  Json cfg_json = config_json(config);
  detail::write_json(config.out / "config.json", cfg_json);
  detail::write_json(config.out / "report.json", to_json(report));
  detail::write_text(config.out / "checks.csv", csv.str());
  return report.all_passed ? kExitSuccess : kExitCheckFailed;
}

Json to_json(const VerifyReport& report) {
  Json j;
  j["schema_version"] = report.schema_version;
  j["command"] = "verify";
  j["d"] = report.d;
  j["n_list"] = report.n_list;
  j["fault_injected"] = report.fault_injected;
  j["all_passed"] = report.all_passed;
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    Json e;
    e["group"] = c.group;
    e["name"] = c.name;
    e["residual"] = c.residual;
    e["tolerance"] = c.tolerance;
    e["passed"] = c.passed;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  return j;
}

VerifyReport verify_report_from_json(const Json& j) {
  try {
    VerifyReport r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kSchemaVersion) throw UsageError("schema", "unsupported schema_version");
    if (j.at("command").get<std::string>() != "verify") throw UsageError("schema", "not a verify report");
    r.d = j.at("d").get<int>();
    r.n_list = j.at("n_list").get<std::vector<int>>();
    r.fault_injected = j.at("fault_injected").get<bool>();
    r.all_passed = j.at("all_passed").get<bool>();
    for (const auto& e : j.at("checks")) {
      r.checks.push_back({e.at("group").get<std::string>(), e.at("name").get<std::string>(),
                          e.at("residual").get<double>(), e.at("tolerance").get<double>(),
                          e.at("passed").get<bool>()});
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("schema", std::string("malformed verify report: ") + e.what());
  }
}

}  // namespace zagff::cli
