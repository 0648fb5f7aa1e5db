#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <span>
#include <utility>
#include <vector>

#include "zagff/lattice.hpp"

namespace zagff {

// ---------------------------------------------------------------------------
// Green's function of simple random walk on Z^d
// ---------------------------------------------------------------------------

/// g_{Z^3}(0, 0), frozen after cross-checking quadrature against the
/// return-probability series and Monte Carlo visit counts.
inline constexpr double kGreenOriginD3 = 1.5163861;

struct QuadratureResult {
  double value = 0.0;
  /// |difference| between the last two refinement levels.
  double error_estimate = 0.0;
  int refinements = 0;
};

/// g_{Z^d}(0, x) = (2 pi)^{-d} int cos(theta . x) / (1 - (1/d) sum_j cos theta_j) d theta.
///
/// Tensor Gauss-Legendre on dyadic shells that shrink toward the integrable
/// singularity at theta = 0; each pass doubles the cell count per axis until
/// two passes differ by less than `tol`. Throws kUnsupportedDimension for
/// d < 3 and kNonConvergence (with the achieved estimate) if refinement
/// stalls.
QuadratureResult green_zd_quadrature(const LatticePoint& x, double tol = 1e-7);

double green_zd(const LatticePoint& x);

/// g_{Z^d}(0,0): the golden constant for d = 3, quadrature otherwise.
double green_origin(int d);

/// Memoized green_zd keyed by the sorted absolute coordinates (g is invariant
/// under coordinate permutations and sign flips). Safe for concurrent use.
class GreenZdCache {
 public:
  explicit GreenZdCache(double tol = 1e-7) : tol_(tol) {}

  double operator()(const LatticePoint& x);
  double operator()(const LatticePoint& x, const LatticePoint& y) { return (*this)(x - y); }

 private:
  double tol_;
  std::mutex mutex_;
  std::map<std::vector<Coord>, double> values_;
};

// ---------------------------------------------------------------------------
// Zero-average Green's function on the torus
// ---------------------------------------------------------------------------

/// Eigenvalues lambda_k = 1 - (1/d) sum_j cos(2 pi k_j / n) of I - P on the
/// torus, indexed by the lexicographic index of the frequency vector k.
std::vector<double> laplacian_eigenvalues(const FieldConfig& cfg);

/// G_T(x, 0) for every displacement x, together with the spectral symbols.
class GreenTable {
 public:
  GreenTable(FieldConfig cfg, std::vector<double> values, std::vector<double> eigenvalues);

  const FieldConfig& config() const noexcept { return cfg_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }

  /// G_T(0, 0) = v_n.
  double origin() const noexcept { return values_.front(); }
  double at(const TorusPoint& displacement) const;
  double at_index(std::int64_t displacement_index) const { return values_[static_cast<std::size_t>(displacement_index)]; }
  /// G_T(x, y) = G_T(x - y, 0).
  double covariance(const TorusPoint& x, const TorusPoint& y) const;
  double covariance_index(std::int64_t x, std::int64_t y) const;

  /// Copy with G(0,0) shifted by `delta`; lets tests confirm the verifiers
  /// detect a wrong table.
  GreenTable with_origin_offset(double delta) const;

 private:
  FieldConfig cfg_;
  std::vector<double> values_;
  std::vector<double> eigenvalues_;
};

/// values[x] = (1/N) sum_{k != 0} cos(2 pi k.x / n) / lambda_k, via one
/// real inverse FFT of the inverse-eigenvalue array with the k = 0 mode
/// removed.
GreenTable zero_average_green(const FieldConfig& cfg);

/// CSV `x_1,...,x_d,G_value`, rows in lexicographic displacement order.
void write_green_table_csv(const GreenTable& table, std::ostream& out);

// ---------------------------------------------------------------------------
// Killed Green's functions and exit quantities (dense exact solves)
// ---------------------------------------------------------------------------

/// Regions larger than this are refused by the dense solvers.
inline constexpr std::size_t kMaxDenseRegion = 10'000;

/// A finite set of sites on Z^d, or on a torus when modulus() > 0.
class Region {
 public:
  static Region lattice(int d, std::vector<LatticePoint> sites);
  static Region torus(const FieldConfig& cfg, std::vector<TorusPoint> sites);
  /// Box prod_j [lo_j, hi_j] on Z^d.
  static Region lattice_box(const LatticePoint& lo, const LatticePoint& hi);
  /// Image of the box [lo_j, hi_j] (coordinates within [0, n-1]) on the torus.
  static Region torus_box(const FieldConfig& cfg, const LatticePoint& lo, const LatticePoint& hi);
  static Region l1_ball(const LatticePoint& center, Coord radius);
  static Region linf_ball(const LatticePoint& center, Coord radius);
  /// Every torus site except `removed`.
  static Region torus_complement(const FieldConfig& cfg, const std::vector<TorusPoint>& removed);

  int dim() const noexcept { return d_; }
  /// Torus side length, or 0 for Z^d.
  int modulus() const noexcept { return n_; }
  std::size_t size() const noexcept { return sites_.size(); }
  const std::vector<std::vector<Coord>>& sites() const noexcept { return sites_; }

  bool contains(std::span<const Coord> x) const;
  std::optional<std::size_t> index_of(std::span<const Coord> x) const;

  /// Calls visit(neighbor) for each of the 2d nearest neighbours of x
  /// (reduced mod n on a torus; repeated when n = 2).
  void for_each_neighbor(std::span<const Coord> x, const std::function<void(std::span<const Coord>)>& visit) const;

  /// Sites outside the region adjacent to it, lexicographically sorted.
  std::vector<std::vector<Coord>> exterior_boundary() const;

 private:
  struct VecHash {
    std::size_t operator()(const std::vector<Coord>& v) const noexcept;
  };

  Region(int d, int n, std::vector<std::vector<Coord>> sites);

  int d_;
  int n_;
  std::vector<std::vector<Coord>> sites_;
  std::optional<std::pair<std::vector<Coord>, std::vector<Coord>>> box_;
  std::shared_ptr<const std::unordered_map<std::vector<Coord>, std::size_t, VecHash>> index_;
};

/// Factorization of I - P_V for a region V, answering exact killed-walk
/// queries: g^V, exit-time expectations, harmonic measure.
class KilledGreenSolve {
 public:
  explicit KilledGreenSolve(Region region);
  ~KilledGreenSolve();
  KilledGreenSolve(KilledGreenSolve&&) noexcept;
  KilledGreenSolve& operator=(KilledGreenSolve&&) noexcept;

  const Region& region() const noexcept { return region_; }

  /// g^V(x, y); zero if x or y lies outside V.
  double green(std::span<const Coord> x, std::span<const Coord> y) const;
  /// E_x[T_V] in discrete steps; zero outside V.
  double expected_exit_time(std::span<const Coord> x) const;
  /// E_x[f(X_{T_V})]; f(x) itself when x is outside V.
  double exit_expectation(std::span<const Coord> x, const std::function<double(std::span<const Coord>)>& f) const;
  /// P_x[X_{T_V} = z] for each exterior boundary site z (sorted). Outside V
  /// the measure is the point mass at x.
  std::vector<std::pair<std::vector<Coord>, double>> harmonic_measure(std::span<const Coord> x) const;

 private:
  struct Impl;
  std::vector<double> solve(std::vector<double> rhs) const;

  Region region_;
  std::unique_ptr<Impl> impl_;
};

double killed_green(const Region& region, std::span<const Coord> x, std::span<const Coord> y);

// ---------------------------------------------------------------------------
// Identity verifiers and estimates
// ---------------------------------------------------------------------------

/// |g(x,y) - g^V(x,y) - E_x[g(X_{T_V}, y)]| for a finite V on Z^d. Limited
/// only by quadrature error in g.
double verify_spatial_markov_zd(const Region& region, const LatticePoint& x, const LatticePoint& y,
                                GreenZdCache& green);

/// |G(x,y) - g^U(x,y) - E_x[G(X_{T_U}, y)] + E_x[T_U] / n^d| for a proper
/// subset U of the torus. Every term is an exact solve.
double verify_markov_decomposition_torus(const GreenTable& table, const Region& region, const TorusPoint& x,
                                         const TorusPoint& y);

struct DecayProfile {
  struct Row {
    std::int64_t distance;
    double max_abs_green;
  };
  int n = 0;
  int d = 0;
  std::vector<Row> rows;
  /// Smallest c with |G(x,0)| <= c (log n)^{3d/2} d_T(x,0)^{2-d} for x != 0.
  double fitted_constant = 0.0;
};

DecayProfile decay_profile_torus(const GreenTable& table);

struct ConvergenceReport {
  struct Row {
    int n;
    double v_n;
    double v;
    double gap;
    /// (log n)^{3d/2} n^{2-d}
    double bound;
  };
  int d = 0;
  std::vector<Row> rows;
  /// Whether gap strictly decreases along increasing n.
  bool gaps_strictly_decreasing = false;
};

ConvergenceReport convergence_report(const std::vector<int>& n_list, int d);

/// (n sqrt(d) + 2)^2: upper bound on the expected exit time from [1, n-2]^d
/// started at its centre.
double exit_time_bound(int n, int d);

}  // namespace zagff
