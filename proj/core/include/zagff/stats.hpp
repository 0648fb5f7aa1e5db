#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zagff/extremes.hpp"
#include "zagff/lattice.hpp"
#include "zagff/rng.hpp"
#include "zagff/sampler.hpp"

namespace zagff {

/// exp(-e^{-z}).
double gumbel_cdf(double z) noexcept;
/// -log(-log p) for p in (0, 1).
double gumbel_quantile(double p);
/// Standard normal upper tail P(Z > z).
double normal_sf(double z) noexcept;

/// sup_z |F_M(z) - F(z)| evaluated at the jump points of the empirical CDF.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Partition of [0,1)^d into prod_j parts[j] congruent boxes. Requires
/// n % parts[j] == 0 on the torus it is applied to.
struct CellSplit {
  std::vector<int> parts;

  static CellSplit none(int d) { return {std::vector<int>(static_cast<std::size_t>(d), 1)}; }
  int cells() const noexcept;
};

/// f = c * 1{location in box} * 1{height > delta}; the box is
/// prod_j [lo_j, hi_j) within [0,1)^d.
struct IndicatorFunction {
  double c = 1.0;
  std::vector<double> box_lo;
  std::vector<double> box_hi;
  double delta = 0.0;

  static IndicatorFunction whole_torus(int d, double c, double delta);

  double operator()(std::span<const double> location, double height) const noexcept;
  double volume() const noexcept;
  /// exp(-(1 - e^{-c}) |B| e^{-delta}): the Laplace functional of the
  /// Poisson measure with intensity dt (x) e^{-z} dz at f.
  double limit_laplace() const noexcept;
  std::string describe() const;
};

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct GumbelReport {
  struct Quantile {
    double probability;
    double empirical;
    double limit;
    double deviation;
  };
  int n = 0;
  int d = 0;
  NormalizingConstants constants;
  std::int64_t replicates = 0;
  double ks = 0.0;
  std::vector<Quantile> quantiles;
  /// Rescaled maxima in replicate order.
  std::vector<double> maxima;
};

GumbelReport gumbel_report_from_maxima(int n, int d, const NormalizingConstants& constants, std::vector<double> maxima);

struct PoissonReport {
  double delta = 0.0;
  double threshold = 0.0;
  std::int64_t replicates = 0;
  /// Exceedance counts per replicate.
  std::vector<std::int64_t> counts;
  double mean = 0.0;
  double std_error = 0.0;
  /// Sample variance over mean; 0 when the mean is 0.
  double dispersion = 0.0;
  /// N * P(N(0, v_n) > u_N(delta)).
  double finite_n_mean = 0.0;
  /// e^{-delta}.
  double limit_mean = 0.0;
  CellSplit split;
  std::vector<double> cell_means;
  /// Row-major cells x cells Pearson correlation matrix; entries involving a
  /// constant cell are reported as 0.
  std::vector<double> cell_correlation;
  double max_abs_cell_correlation = 0.0;
};

/// Builds the report from raw counts; cell_counts is replicate-major
/// (replicates x cells) and may be empty.
PoissonReport poisson_report_from_counts(double delta, double threshold, std::vector<std::int64_t> counts,
                                         const CellSplit& split, const std::vector<std::int64_t>& cell_counts,
                                         double finite_n_mean);

struct LaplaceReport {
  std::string descriptor;
  std::int64_t replicates = 0;
  double empirical = 0.0;
  double std_error = 0.0;
  std::optional<double> limit;
};

using TestFunction = std::function<double(std::span<const double> location, double height)>;

/// exp(-eta(f)) for a single pattern.
double laplace_term(const PointPattern& pattern, const TestFunction& f);

LaplaceReport laplace_report_from_terms(std::string descriptor, std::span<const double> terms,
                                        std::optional<double> limit);

/// Empirical E[exp(-eta_n(f))] against the Poisson limit. Throws if f's
/// height cutoff does not exceed a pattern's storage floor.
LaplaceReport laplace_experiment(std::span<const PointPattern> patterns, const IndicatorFunction& f);
/// General f; no closed-form limit is attached.
LaplaceReport laplace_experiment(std::span<const PointPattern> patterns, const TestFunction& f,
                                 std::string descriptor, double support_floor);

struct BoundaryReport {
  double delta = 0.0;
  double beta = 0.75;
  std::int64_t replicates = 0;
  std::int64_t boundary_sites = 0;
  /// Fraction of replicates with some site outside R_n above u_N(delta).
  double rate = 0.0;
  double std_error = 0.0;
  /// |V_n \ R_n| * P(N(0, v_n) > u_N(delta)).
  double union_bound = 0.0;
};

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

/// Everything the battery measures on a single field.
struct ReplicateRecord {
  double max_rescaled = 0.0;
  std::vector<std::int64_t> counts;        // per delta
  std::vector<std::int64_t> cell_counts;   // at deltas.front(), per cell
  std::vector<double> laplace_terms;       // per indicator function
  std::vector<std::uint8_t> boundary_hit;  // per delta
};

struct BatteryConfig {
  std::vector<double> deltas{0.0};
  CellSplit split;
  std::vector<IndicatorFunction> laplace;
  double floor = kDefaultFloor;
  double beta = 0.75;
  bool boundary = false;
};

/// Samples `replicates` fields (replicate i from policy.derive(i)) and
/// records the per-field statistics. Output is in replicate order whatever
/// the worker count.
std::vector<ReplicateRecord> run_battery(const SpectralSampler& sampler, const NormalizingConstants& constants,
                                         std::int64_t replicates, const SeedPolicy& policy,
                                         const BatteryConfig& config);

GumbelReport gumbel_experiment(const SpectralSampler& sampler, const NormalizingConstants& constants,
                               std::int64_t replicates, const SeedPolicy& policy);

PoissonReport poisson_experiment(const SpectralSampler& sampler, const NormalizingConstants& constants, double delta,
                                 std::int64_t replicates, const SeedPolicy& policy, const CellSplit& split);

BoundaryReport boundary_exceedance_rate(const SpectralSampler& sampler, const NormalizingConstants& constants,
                                        double delta, std::int64_t replicates, const SeedPolicy& policy,
                                        double beta = 0.75);

/// N * P(N(0, v) > u).
double finite_n_exceedance_mean(std::int64_t sites, double site_variance, double level) noexcept;

// CSV summary rows.
void write_gumbel_summary_csv(const GumbelReport& report, std::ostream& out);
void write_poisson_summary_csv(const std::vector<PoissonReport>& reports, std::ostream& out);

}  // namespace zagff
