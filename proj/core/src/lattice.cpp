#include "zagff/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "zagff/error.hpp"

namespace zagff {

namespace {

Coord floor_mod(Coord a, Coord n) {
  Coord r = a % n;
  return r < 0 ? r + n : r;
}

void require_dim(int got, int want) {
  if (got != want) {
    throw Error(ErrorKind::kDimensionMismatch,
                "point has dimension " + std::to_string(got) + ", expected " + std::to_string(want));
  }
}

// Saturating integer power; saturation only matters for comparisons far
// outside any representable field size.
__extension__ using u128 = unsigned __int128;

u128 ipow_sat(std::uint64_t base, int exp) {
  constexpr auto kMax = std::numeric_limits<u128>::max();
  u128 r = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && r > kMax / base) return kMax;
    r *= base;
  }
  return r;
}

struct PowerFloor {
  Coord floor;
  bool exact;
};

// floor(n^beta) and whether n^beta is an integer. Rational beta = p/q with a
// small denominator is decided in integer arithmetic (k <= n^beta iff
// k^q <= n^p); anything else falls back to long double.
PowerFloor power_floor(int n, double beta) {
  const long double t = std::pow(static_cast<long double>(n), static_cast<long double>(beta));
  for (int q = 1; q <= 8; ++q) {
    const double p_real = beta * q;
    const long long p = std::llround(p_real);
    if (std::abs(p_real - static_cast<double>(p)) > 1e-12 || p < 0 || p > 16) continue;
    const auto rhs = ipow_sat(static_cast<std::uint64_t>(n), static_cast<int>(p));
    auto k = static_cast<Coord>(std::floor(t));
    while (k > 0 && ipow_sat(static_cast<std::uint64_t>(k), q) > rhs) --k;
    while (ipow_sat(static_cast<std::uint64_t>(k + 1), q) <= rhs) ++k;
    return {k, ipow_sat(static_cast<std::uint64_t>(k), q) == rhs};
  }
  const auto k = static_cast<Coord>(std::floor(t));
  return {k, static_cast<long double>(k) == t};
}

}  // namespace

FieldConfig::FieldConfig(int d, int n) : d_(d), n_(n), sites_(1) {
  if (d < 3) {
    throw Error(ErrorKind::kUnsupportedDimension,
                "dimension d=" + std::to_string(d) + " is not supported (need d >= 3)");
  }
  if (n < 2) {
    throw Error(ErrorKind::kInvalidArgument, "side length n=" + std::to_string(n) + " must be >= 2");
  }
  for (int j = 0; j < d; ++j) {
    if (sites_ > kMaxSites / n) {
      throw Error(ErrorKind::kResourceExhausted,
                  "torus with n=" + std::to_string(n) + ", d=" + std::to_string(d) +
                      " exceeds the addressable field size");
    }
    sites_ *= n;
  }
}

LatticePoint LatticePoint::unit(int d, int axis, Coord sign) {
  std::vector<Coord> c(static_cast<std::size_t>(d), 0);
  c.at(static_cast<std::size_t>(axis)) = sign;
  return LatticePoint(std::move(c));
}

LatticePoint LatticePoint::operator+(const LatticePoint& other) const {
  require_dim(other.dim(), dim());
  std::vector<Coord> c(coords_);
  for (std::size_t j = 0; j < c.size(); ++j) c[j] += other.coords_[j];
  return LatticePoint(std::move(c));
}

LatticePoint LatticePoint::operator-(const LatticePoint& other) const {
  require_dim(other.dim(), dim());
  std::vector<Coord> c(coords_);
  for (std::size_t j = 0; j < c.size(); ++j) c[j] -= other.coords_[j];
  return LatticePoint(std::move(c));
}

LatticePoint LatticePoint::operator-() const {
  std::vector<Coord> c(coords_);
  for (auto& v : c) v = -v;
  return LatticePoint(std::move(c));
}

TorusPoint::TorusPoint(std::vector<Coord> coords, const FieldConfig& cfg)
    : coords_(std::move(coords)), n_(cfg.n()) {
  require_dim(dim(), cfg.d());
  for (Coord c : coords_) {
    if (c < 0 || c >= n_) {
      throw Error(ErrorKind::kInvalidArgument,
                  "torus coordinate " + std::to_string(c) + " outside [0, " + std::to_string(n_ - 1) + "]");
    }
  }
}

TorusPoint TorusPoint::operator+(const TorusPoint& other) const {
  require_dim(other.dim(), dim());
  std::vector<Coord> c(coords_);
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = (c[j] + other.coords_[j]) % n_;
  return TorusPoint(std::move(c), n_);
}

TorusPoint TorusPoint::operator-() const {
  std::vector<Coord> c(coords_);
  for (auto& v : c) v = (n_ - v) % n_;
  return TorusPoint(std::move(c), n_);
}

TorusPoint project(const LatticePoint& x, const FieldConfig& cfg) {
  require_dim(x.dim(), cfg.d());
  std::vector<Coord> c(x.coords().begin(), x.coords().end());
  for (auto& v : c) v = floor_mod(v, cfg.n());
  return TorusPoint(std::move(c), cfg);
}

LatticePoint representative(const TorusPoint& x) {
  return LatticePoint(std::vector<Coord>(x.coords().begin(), x.coords().end()));
}

std::int64_t torus_distance(const TorusPoint& x, const TorusPoint& y, const FieldConfig& cfg) {
  require_dim(x.dim(), cfg.d());
  require_dim(y.dim(), cfg.d());
  std::int64_t dist = 0;
  const Coord n = cfg.n();
  for (int j = 0; j < cfg.d(); ++j) {
    const Coord delta = x[j] > y[j] ? x[j] - y[j] : y[j] - x[j];
    dist += std::min(delta, n - delta);
  }
  return dist;
}

std::int64_t site_index(const TorusPoint& x, const FieldConfig& cfg) {
  require_dim(x.dim(), cfg.d());
  std::int64_t idx = 0;
  for (int j = 0; j < cfg.d(); ++j) idx = idx * cfg.n() + x[j];
  return idx;
}

void site_coords(std::int64_t index, const FieldConfig& cfg, std::span<Coord> out) {
  for (int j = cfg.d() - 1; j >= 0; --j) {
    out[static_cast<std::size_t>(j)] = index % cfg.n();
    index /= cfg.n();
  }
}

TorusPoint site_point(std::int64_t index, const FieldConfig& cfg) {
  if (index < 0 || index >= cfg.sites()) {
    throw Error(ErrorKind::kInvalidArgument, "site index " + std::to_string(index) + " out of range");
  }
  std::vector<Coord> c(static_cast<std::size_t>(cfg.d()));
  site_coords(index, cfg, c);
  return TorusPoint(std::move(c), cfg);
}

BulkRegion::BulkRegion(const FieldConfig& cfg, double beta) : d_(cfg.d()), beta_(beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "bulk exponent beta must lie in (0, 1)");
  }
  const auto [f, exact] = power_floor(cfg.n(), beta);
  // c > n^beta  <=>  c >= floor(n^beta) + 1
  // c <= n - n^beta  <=>  c <= n - ceil(n^beta)
  lo_ = f + 1;
  hi_ = cfg.n() - (exact ? f : f + 1);
}

std::int64_t BulkRegion::size() const noexcept {
  if (empty()) return 0;
  std::int64_t s = 1;
  for (int j = 0; j < d_; ++j) s *= (hi_ - lo_ + 1);
  return s;
}

bool BulkRegion::contains_site(std::span<const Coord> coords) const noexcept {
  return std::all_of(coords.begin(), coords.end(), [&](Coord c) { return c >= lo_ && c <= hi_; });
}

bool BulkRegion::contains(const LatticePoint& x) const {
  require_dim(x.dim(), d_);
  return contains_site(x.coords());
}

bool bulk_region_contains(const LatticePoint& x, const FieldConfig& cfg, double beta) {
  return BulkRegion(cfg, beta).contains(x);
}

}  // namespace zagff
