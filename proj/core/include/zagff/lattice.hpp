#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace zagff {

using Coord = std::int64_t;

/// Largest torus (in sites) the library will allocate a field for.
inline constexpr std::int64_t kMaxSites = std::int64_t{1} << 27;

/// Dimension d >= 3 and side n >= 2 of the discrete torus (Z/nZ)^d, with
/// N = n^d computed under overflow checking.
class FieldConfig {
 public:
  FieldConfig(int d, int n);

  int d() const noexcept { return d_; }
  int n() const noexcept { return n_; }
  std::int64_t sites() const noexcept { return sites_; }

  friend bool operator==(const FieldConfig&, const FieldConfig&) = default;

 private:
  int d_;
  int n_;
  std::int64_t sites_;
};

/// A point of Z^d.
class LatticePoint {
 public:
  LatticePoint() = default;
  explicit LatticePoint(std::vector<Coord> coords) : coords_(std::move(coords)) {}
  LatticePoint(std::initializer_list<Coord> coords) : coords_(coords) {}

  static LatticePoint origin(int d) { return LatticePoint(std::vector<Coord>(d, 0)); }
  static LatticePoint unit(int d, int axis, Coord sign = 1);

  int dim() const noexcept { return static_cast<int>(coords_.size()); }
  std::span<const Coord> coords() const noexcept { return coords_; }
  Coord operator[](int j) const { return coords_[static_cast<std::size_t>(j)]; }
  Coord& operator[](int j) { return coords_[static_cast<std::size_t>(j)]; }

  LatticePoint operator+(const LatticePoint& other) const;
  LatticePoint operator-(const LatticePoint& other) const;
  LatticePoint operator-() const;

  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;

 private:
  std::vector<Coord> coords_;
};

/// A point of the torus; every coordinate lies in [0, n-1].
class TorusPoint {
 public:
  TorusPoint(std::vector<Coord> coords, const FieldConfig& cfg);

  int dim() const noexcept { return static_cast<int>(coords_.size()); }
  int side() const noexcept { return n_; }
  std::span<const Coord> coords() const noexcept { return coords_; }
  Coord operator[](int j) const { return coords_[static_cast<std::size_t>(j)]; }

  /// Torus addition.
  TorusPoint operator+(const TorusPoint& other) const;
  TorusPoint operator-() const;

  friend bool operator==(const TorusPoint&, const TorusPoint&) = default;
  friend auto operator<=>(const TorusPoint&, const TorusPoint&) = default;

 private:
  TorusPoint(std::vector<Coord> coords, int n) : coords_(std::move(coords)), n_(n) {}

  std::vector<Coord> coords_;
  int n_;
};

/// Canonical projection Z^d -> T_n^d.
TorusPoint project(const LatticePoint& x, const FieldConfig& cfg);

/// The unique preimage of x in [0, n-1]^d.
LatticePoint representative(const TorusPoint& x);

/// Graph distance on the torus: sum_j min(|x_j - y_j|, n - |x_j - y_j|).
std::int64_t torus_distance(const TorusPoint& x, const TorusPoint& y, const FieldConfig& cfg);

/// Row-major lexicographic site index (first coordinate most significant).
std::int64_t site_index(const TorusPoint& x, const FieldConfig& cfg);
TorusPoint site_point(std::int64_t index, const FieldConfig& cfg);

/// Writes the coordinates of `index` into `out` (size d) without allocating.
void site_coords(std::int64_t index, const FieldConfig& cfg, std::span<Coord> out);

/// The box R_n = (n^beta, n - n^beta]^d of "bulk" sites, stored as inclusive
/// integer bounds [lo, hi] per coordinate. Boundary classification is exact
/// whenever n^beta is an integer.
class BulkRegion {
 public:
  explicit BulkRegion(const FieldConfig& cfg, double beta = 0.75);

  Coord lo() const noexcept { return lo_; }
  Coord hi() const noexcept { return hi_; }
  bool empty() const noexcept { return lo_ > hi_; }
  /// Number of sites |R_n|.
  std::int64_t size() const noexcept;
  double beta() const noexcept { return beta_; }

  bool contains(const LatticePoint& x) const;
  bool contains_site(std::span<const Coord> coords) const noexcept;

 private:
  int d_;
  double beta_;
  Coord lo_;
  Coord hi_;
};

bool bulk_region_contains(const LatticePoint& x, const FieldConfig& cfg, double beta = 0.75);

}  // namespace zagff
