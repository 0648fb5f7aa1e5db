#include "zagff/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "zagff/error.hpp"
#include "zagff/parallel.hpp"

namespace zagff {

double gumbel_cdf(double z) noexcept { return std::exp(-std::exp(-z)); }

double gumbel_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::kInvalidArgument, "Gumbel quantile needs p in (0, 1)");
  return -std::log(-std::log(p));
}

double normal_sf(double z) noexcept { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw Error(ErrorKind::kInvalidArgument, "KS statistic of an empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double v : sorted) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kInvalidArgument, "non-finite sample");
  }
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  return d;
}

int CellSplit::cells() const noexcept {
  int c = 1;
  for (int p : parts) c *= p;
  return c;
}

IndicatorFunction IndicatorFunction::whole_torus(int d, double c, double delta) {
  return {c, std::vector<double>(static_cast<std::size_t>(d), 0.0), std::vector<double>(static_cast<std::size_t>(d), 1.0),
          delta};
}

double IndicatorFunction::operator()(std::span<const double> location, double height) const noexcept {
  if (!(height > delta)) return 0.0;
  for (std::size_t j = 0; j < location.size(); ++j) {
    if (location[j] < box_lo[j] || location[j] >= box_hi[j]) return 0.0;
  }
  return c;
}

double IndicatorFunction::volume() const noexcept {
  double v = 1.0;
  for (std::size_t j = 0; j < box_lo.size(); ++j) v *= std::max(0.0, box_hi[j] - box_lo[j]);
  return v;
}

double IndicatorFunction::limit_laplace() const noexcept {
  return std::exp(-(1.0 - std::exp(-c)) * volume() * std::exp(-delta));
}

std::string IndicatorFunction::describe() const {
  std::ostringstream s;
  s.precision(17);
  s << c << "*1{box=[";
  for (std::size_t j = 0; j < box_lo.size(); ++j) {
    s << (j ? "x" : "") << '[' << box_lo[j] << ',' << box_hi[j] << ')';
  }
  s << "], height>" << delta << '}';
  return s.str();
}

namespace {

double empirical_quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

void require_replicates(std::int64_t replicates) {
  if (replicates < 100) throw Error(ErrorKind::kInvalidArgument, "experiments need at least 100 replicates");
}

}  // namespace

GumbelReport gumbel_report_from_maxima(int n, int d, const NormalizingConstants& constants,
                                       std::vector<double> maxima) {
  GumbelReport r;
  r.n = n;
  r.d = d;
  r.constants = constants;
  r.replicates = static_cast<std::int64_t>(maxima.size());
  r.ks = ks_statistic(maxima, gumbel_cdf);
  std::vector<double> sorted = maxima;
  std::sort(sorted.begin(), sorted.end());
  for (double p : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    const double emp = empirical_quantile(sorted, p);
    const double lim = gumbel_quantile(p);
    r.quantiles.push_back({p, emp, lim, emp - lim});
  }
  r.maxima = std::move(maxima);
  return r;
}

PoissonReport poisson_report_from_counts(double delta, double threshold, std::vector<std::int64_t> counts,
                                         const CellSplit& split, const std::vector<std::int64_t>& cell_counts,
                                         double finite_n_mean) {
  if (counts.empty()) throw Error(ErrorKind::kInvalidArgument, "no counts");
  PoissonReport r;
  r.delta = delta;
  r.threshold = threshold;
  r.replicates = static_cast<std::int64_t>(counts.size());
  r.finite_n_mean = finite_n_mean;
  r.limit_mean = std::exp(-delta);
  r.split = split;
  const double m = static_cast<double>(counts.size());
  double s = 0.0;
  for (auto c : counts) s += static_cast<double>(c);
  r.mean = s / m;
  double ss = 0.0;
  for (auto c : counts) ss += (static_cast<double>(c) - r.mean) * (static_cast<double>(c) - r.mean);
  const double var = counts.size() > 1 ? ss / (m - 1.0) : 0.0;
  r.std_error = std::sqrt(var / m);
  r.dispersion = r.mean > 0.0 ? var / r.mean : 0.0;

  const int cells = split.cells();
  if (!cell_counts.empty()) {
    if (cell_counts.size() != counts.size() * static_cast<std::size_t>(cells)) {
      throw Error(ErrorKind::kInvalidArgument, "cell count table has the wrong shape");
    }
    const auto k = static_cast<std::size_t>(cells);
    r.cell_means.assign(k, 0.0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
      for (std::size_t c = 0; c < k; ++c) r.cell_means[c] += static_cast<double>(cell_counts[i * k + c]);
    }
    for (auto& v : r.cell_means) v /= m;
    std::vector<double> cov(k * k, 0.0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
      for (std::size_t a = 0; a < k; ++a) {
        const double da = static_cast<double>(cell_counts[i * k + a]) - r.cell_means[a];
        for (std::size_t b = 0; b < k; ++b) {
          cov[a * k + b] += da * (static_cast<double>(cell_counts[i * k + b]) - r.cell_means[b]);
        }
      }
    }
    r.cell_correlation.assign(k * k, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) {
        const double denom = std::sqrt(cov[a * k + a] * cov[b * k + b]);
        const double rho = denom > 0.0 ? cov[a * k + b] / denom : 0.0;
        r.cell_correlation[a * k + b] = rho;
        if (a != b) r.max_abs_cell_correlation = std::max(r.max_abs_cell_correlation, std::abs(rho));
      }
    }
  }
  r.counts = std::move(counts);
  return r;
}

double laplace_term(const PointPattern& pattern, const TestFunction& f) {
  double total = 0.0;
  for (const auto& p : pattern.points) total += f(p.location, p.height);
  return std::exp(-total);
}

LaplaceReport laplace_report_from_terms(std::string descriptor, std::span<const double> terms,
                                        std::optional<double> limit) {
  LaplaceReport r;
  r.descriptor = std::move(descriptor);
  r.replicates = static_cast<std::int64_t>(terms.size());
  r.limit = limit;
  if (terms.empty()) return r;
  const double m = static_cast<double>(terms.size());
  double s = 0.0;
  for (double t : terms) s += t;
  r.empirical = s / m;
  double ss = 0.0;
  for (double t : terms) ss += (t - r.empirical) * (t - r.empirical);
  r.std_error = terms.size() > 1 ? std::sqrt(ss / (m - 1.0) / m) : 0.0;
  return r;
}

LaplaceReport laplace_experiment(std::span<const PointPattern> patterns, const TestFunction& f, std::string descriptor,
                                 double support_floor) {
  std::vector<double> terms;
  terms.reserve(patterns.size());
  for (const auto& p : patterns) {
    if (!(support_floor > p.floor)) {
      throw Error(ErrorKind::kInvalidArgument, "test function support reaches below the pattern floor");
    }
    terms.push_back(laplace_term(p, f));
  }
  return laplace_report_from_terms(std::move(descriptor), terms, std::nullopt);
}

LaplaceReport laplace_experiment(std::span<const PointPattern> patterns, const IndicatorFunction& f) {
  auto r = laplace_experiment(
      patterns, [&f](std::span<const double> loc, double h) { return f(loc, h); }, f.describe(), f.delta);
  r.limit = f.limit_laplace();
  return r;
}

double finite_n_exceedance_mean(std::int64_t sites, double site_variance, double level) noexcept {
  return static_cast<double>(sites) * normal_sf(level / std::sqrt(site_variance));
}

std::vector<ReplicateRecord> run_battery(const SpectralSampler& sampler, const NormalizingConstants& constants,
                                         std::int64_t replicates, const SeedPolicy& policy,
                                         const BatteryConfig& config) {
  const auto& cfg = sampler.config();
  if (constants.sites != cfg.sites()) {
    throw Error(ErrorKind::kInvalidArgument, "normalizing constants were built for a different N");
  }
  if (config.deltas.empty()) throw Error(ErrorKind::kInvalidArgument, "battery needs at least one delta");
  const int d = cfg.d();
  const int n = cfg.n();
  CellSplit split = config.split.parts.empty() ? CellSplit::none(d) : config.split;
  if (static_cast<int>(split.parts.size()) != d) throw Error(ErrorKind::kDimensionMismatch, "split has wrong dimension");
  for (int p : split.parts) {
    if (p < 1 || n % p != 0) {
      throw Error(ErrorKind::kInvalidArgument, "split parts must divide n to give congruent cells");
    }
  }
  for (const auto& f : config.laplace) {
    if (!(f.delta > config.floor)) {
      throw Error(ErrorKind::kInvalidArgument, "test function support reaches below the pattern floor");
    }
    if (static_cast<int>(f.box_lo.size()) != d || static_cast<int>(f.box_hi.size()) != d) {
      throw Error(ErrorKind::kDimensionMismatch, "test function box has wrong dimension");
    }
  }
  const std::size_t sites = static_cast<std::size_t>(cfg.sites());
  std::vector<int> cell_of(sites);
  std::vector<std::uint8_t> in_bulk;
  std::vector<std::vector<double>> locations(sites, std::vector<double>(static_cast<std::size_t>(d)));
  std::optional<BulkRegion> bulk;
  if (config.boundary) {
    bulk.emplace(cfg, config.beta);
    if (bulk->empty()) throw Error(ErrorKind::kEmptyRegion, "bulk region R_n is empty for this n");
    in_bulk.resize(sites);
  }
  std::vector<Coord> c(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < sites; ++i) {
    site_coords(static_cast<std::int64_t>(i), cfg, c);
    int cell = 0;
    for (int j = 0; j < d; ++j) {
      const auto pj = split.parts[static_cast<std::size_t>(j)];
      cell = cell * pj + static_cast<int>(c[static_cast<std::size_t>(j)] * pj / n);
      locations[i][static_cast<std::size_t>(j)] = static_cast<double>(c[static_cast<std::size_t>(j)]) / n;
    }
    cell_of[i] = cell;
    if (bulk) in_bulk[i] = bulk->contains_site(c) ? 1 : 0;
  }
  std::vector<double> levels;
  for (double delta : config.deltas) levels.push_back(threshold(constants, delta));
  const double cell_level = levels.front();
  const auto cells = static_cast<std::size_t>(split.cells());

  std::vector<ReplicateRecord> records(static_cast<std::size_t>(std::max<std::int64_t>(replicates, 0)));
  for_each_field(sampler, policy, replicates, [&](std::int64_t idx, const TorusField& field) {
    ReplicateRecord rec;
    rec.counts.assign(levels.size(), 0);
    rec.cell_counts.assign(cells, 0);
    std::vector<double> mass(config.laplace.size(), 0.0);
    double max_value = field.values.front();
    double max_boundary = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sites; ++i) {
      const double v = field.values[i];
      max_value = std::max(max_value, v);
      if (bulk && in_bulk[i] == 0) max_boundary = std::max(max_boundary, v);
      for (std::size_t k = 0; k < levels.size(); ++k) rec.counts[k] += v > levels[k] ? 1 : 0;
      if (v > cell_level) ++rec.cell_counts[static_cast<std::size_t>(cell_of[i])];
      if (!config.laplace.empty()) {
        const double h = (v - constants.b) / constants.a;
        if (h > config.floor) {
          for (std::size_t k = 0; k < config.laplace.size(); ++k) mass[k] += config.laplace[k](locations[i], h);
        }
      }
    }
    rec.max_rescaled = (max_value - constants.b) / constants.a;
    for (double m : mass) rec.laplace_terms.push_back(std::exp(-m));
    if (bulk) {
      for (double level : levels) rec.boundary_hit.push_back(max_boundary > level ? 1 : 0);
    }
    records[static_cast<std::size_t>(idx)] = std::move(rec);
  });
  return records;
}

GumbelReport gumbel_experiment(const SpectralSampler& sampler, const NormalizingConstants& constants,
                               std::int64_t replicates, const SeedPolicy& policy) {
  require_replicates(replicates);
  const auto records = run_battery(sampler, constants, replicates, policy, BatteryConfig{});
  std::vector<double> maxima;
  maxima.reserve(records.size());
  for (const auto& r : records) maxima.push_back(r.max_rescaled);
  return gumbel_report_from_maxima(sampler.config().n(), sampler.config().d(), constants, std::move(maxima));
}

PoissonReport poisson_experiment(const SpectralSampler& sampler, const NormalizingConstants& constants, double delta,
                                 std::int64_t replicates, const SeedPolicy& policy, const CellSplit& split) {
  require_replicates(replicates);
  BatteryConfig config;
  config.deltas = {delta};
  config.split = split;
  const auto records = run_battery(sampler, constants, replicates, policy, config);
  std::vector<std::int64_t> counts;
  std::vector<std::int64_t> cells;
  for (const auto& r : records) {
    counts.push_back(r.counts.front());
    cells.insert(cells.end(), r.cell_counts.begin(), r.cell_counts.end());
  }
  const double level = threshold(constants, delta);
  const CellSplit used = split.parts.empty() ? CellSplit::none(sampler.config().d()) : split;
  return poisson_report_from_counts(delta, level, std::move(counts), used, cells,
                                    finite_n_exceedance_mean(constants.sites, sampler.site_variance(), level));
}

BoundaryReport boundary_exceedance_rate(const SpectralSampler& sampler, const NormalizingConstants& constants,
                                        double delta, std::int64_t replicates, const SeedPolicy& policy,
                                        double beta) {
  require_replicates(replicates);
  BatteryConfig config;
  config.deltas = {delta};
  config.boundary = true;
  config.beta = beta;
  const auto records = run_battery(sampler, constants, replicates, policy, config);
  BoundaryReport r;
  r.delta = delta;
  r.beta = beta;
  r.replicates = replicates;
  const BulkRegion bulk(sampler.config(), beta);
  r.boundary_sites = sampler.config().sites() - bulk.size();
  std::int64_t hits = 0;
  for (const auto& rec : records) hits += rec.boundary_hit.front();
  const double m = static_cast<double>(replicates);
  r.rate = static_cast<double>(hits) / m;
  r.std_error = std::sqrt(r.rate * (1.0 - r.rate) / m);
  r.union_bound = static_cast<double>(r.boundary_sites) *
                  normal_sf(threshold(constants, delta) / std::sqrt(sampler.site_variance()));
  return r;
}

void write_gumbel_summary_csv(const GumbelReport& report, std::ostream& out) {
  char buf[256];
  out << "n,d,replicates,ks,b_N,a_N\n";
  std::snprintf(buf, sizeof buf, "%d,%d,%lld,%.17g,%.17g,%.17g\n", report.n, report.d,
                static_cast<long long>(report.replicates), report.ks, report.constants.b, report.constants.a);
  out << buf;
}

void write_poisson_summary_csv(const std::vector<PoissonReport>& reports, std::ostream& out) {
  char buf[320];
  out << "delta,threshold,replicates,mean,std_error,finite_n_mean,limit_mean,dispersion,max_abs_cell_correlation\n";
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.delta, r.threshold,
                  static_cast<long long>(r.replicates), r.mean, r.std_error, r.finite_n_mean, r.limit_mean,
                  r.dispersion, r.max_abs_cell_correlation);
    out << buf;
  }
}

}  // namespace zagff
