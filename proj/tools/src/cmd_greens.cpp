#include <ostream>
#include <sstream>

#include "output.hpp"
#include "zagff/greens.hpp"

namespace zagff::cli {

using detail::fmt;

int cmd_greens(const ExperimentConfig& config, std::ostream& log) {
  detail::prepare_output_dir(config);
  const auto report = convergence_report(config.n_list, config.d);

  Json runs = Json::array();
  for (const auto& row : report.rows) {
    const FieldConfig cfg(config.d, row.n);
    const GreenTable table = zero_average_green(cfg);
    const std::string suffix = "_n" + std::to_string(row.n) + ".csv";

    std::ostringstream table_csv;
    write_green_table_csv(table, table_csv);
    detail::write_text(config.out / ("green_table" + suffix), table_csv.str());

    const DecayProfile profile = decay_profile_torus(table);
    std::ostringstream decay_csv;
    decay_csv << "distance,max_abs_green\n";
    for (const auto& r : profile.rows) decay_csv << r.distance << ',' << fmt(r.max_abs_green) << '\n';
    detail::write_text(config.out / ("decay_profile" + suffix), decay_csv.str());

    Json run;
    run["n"] = row.n;
    run["sites"] = cfg.sites();
    run["v_n"] = row.v_n;
    run["gap"] = row.gap;
    run["bound"] = row.bound;
    run["decay_fitted_constant"] = profile.fitted_constant;
    runs.push_back(std::move(run));
    log << "n=" << row.n << " v_n=" << fmt(row.v_n) << " gap=" << fmt(row.gap) << '\n';
  }

  std::ostringstream conv;
  conv << "n,v_n,v,gap,bound\n";
  for (const auto& r : report.rows) {
    conv << r.n << ',' << fmt(r.v_n) << ',' << fmt(r.v) << ',' << fmt(r.gap) << ',' << fmt(r.bound) << '\n';
  }
  detail::write_text(config.out / "convergence.csv", conv.str());

  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "greens";
  j["d"] = config.d;
  j["v"] = report.rows.front().v;
  j["gaps_strictly_decreasing"] = report.gaps_strictly_decreasing;
  j["runs"] = std::move(runs);
  detail::write_json(config.out / "config.json", config_json(config));
  detail::write_json(config.out / "report.json", j);
  return kExitSuccess;
}

}  // namespace zagff::cli
