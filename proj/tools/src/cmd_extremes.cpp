#include <cmath>
#include <ostream>
#include <sstream>

#include "output.hpp"
#include "zagff/extremes.hpp"
#include "zagff/greens.hpp"
#include "zagff/sampler.hpp"
#include "zagff/stats.hpp"

namespace zagff::cli {

namespace {

using detail::fmt;

Json check(double value, double lo, double hi) {
  Json j;
  j["value"] = value;
  j["low"] = lo;
  j["high"] = hi;
  j["passed"] = value >= lo && value <= hi;
  return j;
}

}  // namespace

int cmd_extremes(const ExperimentConfig& config, std::ostream& log) {
  detail::prepare_output_dir(config);
  const FieldConfig cfg(config.d, config.n());
  const SpectralSampler sampler(cfg);
  const auto constants = normalizing_constants(cfg.sites(), green_origin(config.d));
  const SeedPolicy policy{config.seed};
  const BulkRegion bulk(cfg, config.beta);

  BatteryConfig battery;
  battery.deltas = config.deltas;
  battery.split = CellSplit{config.split};
  battery.floor = config.floor;
  battery.beta = config.beta;
  battery.boundary = !bulk.empty();
  for (double delta : config.deltas) {
    battery.laplace.push_back(IndicatorFunction::whole_torus(config.d, config.laplace_c, delta));
  }
  auto half = IndicatorFunction::whole_torus(config.d, config.laplace_c, config.deltas.front());
  half.box_hi.front() = 0.5;
  battery.laplace.push_back(half);

  const auto records = run_battery(sampler, constants, config.replicates, policy, battery);
  const auto m = static_cast<std::size_t>(config.replicates);

  std::vector<double> maxima;
  maxima.reserve(m);
  for (const auto& r : records) maxima.push_back(r.max_rescaled);
  const GumbelReport gumbel = gumbel_report_from_maxima(cfg.n(), cfg.d(), constants, maxima);

  std::vector<PoissonReport> poisson;
  for (std::size_t k = 0; k < config.deltas.size(); ++k) {
    std::vector<std::int64_t> counts;
    std::vector<std::int64_t> cells;
    counts.reserve(m);
    for (const auto& r : records) {
      counts.push_back(r.counts[k]);
      if (k == 0) cells.insert(cells.end(), r.cell_counts.begin(), r.cell_counts.end());
    }
    const double level = threshold(constants, config.deltas[k]);
    poisson.push_back(poisson_report_from_counts(config.deltas[k], level, std::move(counts), battery.split, cells,
                                                 finite_n_exceedance_mean(cfg.sites(), sampler.site_variance(),
                                                                          level)));
  }

  std::vector<LaplaceReport> laplace;
  for (std::size_t k = 0; k < battery.laplace.size(); ++k) {
    std::vector<double> terms;
    terms.reserve(m);
    for (const auto& r : records) terms.push_back(r.laplace_terms[k]);
    laplace.push_back(
        laplace_report_from_terms(battery.laplace[k].describe(), terms, battery.laplace[k].limit_laplace()));
  }

  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "extremes";
  j["d"] = cfg.d();
  j["n"] = cfg.n();
  j["sites"] = cfg.sites();
  j["replicates"] = config.replicates;
  j["constants"] = {{"variance", constants.variance}, {"b_N", constants.b}, {"a_N", constants.a},
                    {"site_variance_v_n", sampler.site_variance()}};

  Json g;
  g["ks"] = gumbel.ks;
  Json quantiles = Json::array();
  for (const auto& q : gumbel.quantiles) {
    quantiles.push_back({{"probability", q.probability}, {"empirical", q.empirical}, {"limit", q.limit},
                         {"deviation", q.deviation}});
  }
  g["quantiles"] = std::move(quantiles);
  g["check_ks_le_0.10"] = check(gumbel.ks, 0.0, 0.10);
  j["gumbel"] = std::move(g);

  Json pj = Json::array();
  for (const auto& p : poisson) {
    Json e;
    e["delta"] = p.delta;
    e["threshold"] = p.threshold;
    e["mean"] = p.mean;
    e["std_error"] = p.std_error;
    e["finite_n_mean"] = p.finite_n_mean;
    e["limit_mean"] = p.limit_mean;
    e["dispersion"] = p.dispersion;
    e["check_mean_vs_finite_n_3se"] =
        check(p.mean - p.finite_n_mean, -3.0 * p.std_error, 3.0 * p.std_error);
    e["check_mean_vs_limit_0.15"] = check(p.mean - p.limit_mean, -0.15, 0.15);
    e["check_dispersion"] = check(p.dispersion, 0.85, 1.15);
    if (!p.cell_means.empty()) {
      e["split"] = p.split.parts;
      e["cell_means"] = p.cell_means;
      e["cell_correlation"] = p.cell_correlation;
      e["max_abs_cell_correlation"] = p.max_abs_cell_correlation;
      e["check_cell_correlation_0.05"] = check(p.max_abs_cell_correlation, 0.0, 0.05);
    }
    pj.push_back(std::move(e));
  }
  j["poisson"] = std::move(pj);

  Json lj = Json::array();
  for (const auto& l : laplace) {
    Json e;
    e["f"] = l.descriptor;
    e["empirical"] = l.empirical;
    e["std_error"] = l.std_error;
    e["limit"] = *l.limit;
    e["check_3se"] = check(l.empirical - *l.limit, -3.0 * l.std_error, 3.0 * l.std_error);
    lj.push_back(std::move(e));
  }
  j["laplace"] = std::move(lj);

  if (battery.boundary) {
    Json bj = Json::array();
    const std::int64_t boundary_sites = cfg.sites() - bulk.size();
    for (std::size_t k = 0; k < config.deltas.size(); ++k) {
      std::int64_t hits = 0;
      for (const auto& r : records) hits += r.boundary_hit[k];
      const double rate = static_cast<double>(hits) / static_cast<double>(m);
      const double se = std::sqrt(rate * (1.0 - rate) / static_cast<double>(m));
      const double bound = static_cast<double>(boundary_sites) *
                           normal_sf(threshold(constants, config.deltas[k]) / std::sqrt(sampler.site_variance()));
      Json e;
      e["delta"] = config.deltas[k];
      e["beta"] = config.beta;
      e["bulk_lo"] = bulk.lo();
      e["bulk_hi"] = bulk.hi();
      e["boundary_sites"] = boundary_sites;
      e["rate"] = rate;
      e["std_error"] = se;
      e["union_bound"] = bound;
      e["check_rate_le_union_bound_3se"] = check(rate, 0.0, bound + 3.0 * se);
      bj.push_back(std::move(e));
    }
    j["boundary"] = std::move(bj);
  } else {
    j["boundary"] = nullptr;
  }

  std::ostringstream maxima_csv;
  maxima_csv << "replicate,seed,max_rescaled\n";
  for (std::size_t i = 0; i < m; ++i) {
    maxima_csv << i << ',' << policy.derive(i) << ',' << fmt(records[i].max_rescaled) << '\n';
  }
  std::ostringstream counts_csv;
  counts_csv << "replicate";
  for (std::size_t k = 0; k < config.deltas.size(); ++k) counts_csv << ",count_delta_" << k;
  const int cells = battery.split.cells();
  for (int c = 0; c < cells; ++c) counts_csv << ",cell_" << c;
  for (std::size_t k = 0; k < config.deltas.size() && battery.boundary; ++k) counts_csv << ",boundary_hit_" << k;
  counts_csv << '\n';
  for (std::size_t i = 0; i < m; ++i) {
    counts_csv << i;
    for (auto v : records[i].counts) counts_csv << ',' << v;
    for (auto v : records[i].cell_counts) counts_csv << ',' << v;
    for (auto v : records[i].boundary_hit) counts_csv << ',' << static_cast<int>(v);
    counts_csv << '\n';
  }
  std::ostringstream gumbel_csv;
  write_gumbel_summary_csv(gumbel, gumbel_csv);
  std::ostringstream poisson_csv;
  write_poisson_summary_csv(poisson, poisson_csv);

  detail::write_json(config.out / "config.json", config_json(config));
  detail::write_json(config.out / "report.json", j);
  detail::write_text(config.out / "maxima.csv", maxima_csv.str());
  detail::write_text(config.out / "counts.csv", counts_csv.str());
  detail::write_text(config.out / "gumbel_summary.csv", gumbel_csv.str());
  detail::write_text(config.out / "poisson_summary.csv", poisson_csv.str());

  log << "KS=" << fmt(gumbel.ks) << " mean_count=" << fmt(poisson.front().mean)
      << " dispersion=" << fmt(poisson.front().dispersion) << " laplace=" << fmt(laplace.front().empirical) << '\n';
  return kExitSuccess;
}

}  // namespace zagff::cli
