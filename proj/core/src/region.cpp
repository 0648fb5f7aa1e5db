#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "zagff/error.hpp"
#include "zagff/greens.hpp"

namespace zagff {

std::size_t Region::VecHash::operator()(const std::vector<Coord>& v) const noexcept {
  std::size_t h = 0xcbf29ce484222325ull;
  for (Coord c : v) h = (h ^ static_cast<std::size_t>(c)) * 0x100000001b3ull;
  return h;
}

Region::Region(int d, int n, std::vector<std::vector<Coord>> sites) : d_(d), n_(n), sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
  if (std::adjacent_find(sites_.begin(), sites_.end()) != sites_.end()) {
    throw Error(ErrorKind::kInvalidArgument, "region lists a site twice");
  }
  auto index = std::make_shared<std::unordered_map<std::vector<Coord>, std::size_t, VecHash>>();
  index->reserve(sites_.size());
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    if (static_cast<int>(sites_[i].size()) != d_) {
      throw Error(ErrorKind::kDimensionMismatch, "region site has the wrong dimension");
    }
    index->emplace(sites_[i], i);
  }
  index_ = std::move(index);
}

Region Region::lattice(int d, std::vector<LatticePoint> sites) {
  std::vector<std::vector<Coord>> raw;
  raw.reserve(sites.size());
  for (auto& s : sites) raw.emplace_back(s.coords().begin(), s.coords().end());
  return Region(d, 0, std::move(raw));
}

Region Region::torus(const FieldConfig& cfg, std::vector<TorusPoint> sites) {
  std::vector<std::vector<Coord>> raw;
  raw.reserve(sites.size());
  for (auto& s : sites) raw.emplace_back(s.coords().begin(), s.coords().end());
  return Region(cfg.d(), cfg.n(), std::move(raw));
}

namespace {

std::vector<std::vector<Coord>> box_sites(const LatticePoint& lo, const LatticePoint& hi) {
  if (lo.dim() != hi.dim()) throw Error(ErrorKind::kDimensionMismatch, "box corners differ in dimension");
  const int d = lo.dim();
  std::vector<std::vector<Coord>> out;
  for (int j = 0; j < d; ++j) {
    if (hi[j] < lo[j]) return out;
  }
  std::vector<Coord> cur(lo.coords().begin(), lo.coords().end());
  for (;;) {
    out.push_back(cur);
    int j = d - 1;
    while (j >= 0 && cur[static_cast<std::size_t>(j)] == hi[j]) {
      cur[static_cast<std::size_t>(j)] = lo[j];
      --j;
    }
    if (j < 0) break;
    ++cur[static_cast<std::size_t>(j)];
  }
  return out;
}

}  // namespace

Region Region::lattice_box(const LatticePoint& lo, const LatticePoint& hi) {
  Region r(lo.dim(), 0, box_sites(lo, hi));
  r.box_.emplace(std::vector<Coord>(lo.coords().begin(), lo.coords().end()),
                 std::vector<Coord>(hi.coords().begin(), hi.coords().end()));
  return r;
}

Region Region::torus_box(const FieldConfig& cfg, const LatticePoint& lo, const LatticePoint& hi) {
  for (int j = 0; j < lo.dim(); ++j) {
    if (lo[j] < 0 || hi[j] > cfg.n() - 1) {
      throw Error(ErrorKind::kInvalidArgument, "torus box must lie within [0, n-1]^d");
    }
  }
  if (lo.dim() != cfg.d()) throw Error(ErrorKind::kDimensionMismatch, "torus box dimension mismatch");
  Region r(cfg.d(), cfg.n(), box_sites(lo, hi));
  r.box_.emplace(std::vector<Coord>(lo.coords().begin(), lo.coords().end()),
                 std::vector<Coord>(hi.coords().begin(), hi.coords().end()));
  return r;
}

Region Region::l1_ball(const LatticePoint& center, Coord radius) {
  const int d = center.dim();
  LatticePoint lo = center, hi = center;
  for (int j = 0; j < d; ++j) {
    lo[j] -= radius;
    hi[j] += radius;
  }
  std::vector<std::vector<Coord>> sites;
  for (auto& s : box_sites(lo, hi)) {
    Coord dist = 0;
    for (int j = 0; j < d; ++j) {
      const Coord delta = s[static_cast<std::size_t>(j)] - center[j];
      dist += delta < 0 ? -delta : delta;
    }
    if (dist <= radius) sites.push_back(std::move(s));
  }
  return Region(d, 0, std::move(sites));
}

Region Region::linf_ball(const LatticePoint& center, Coord radius) {
  LatticePoint lo = center, hi = center;
  for (int j = 0; j < center.dim(); ++j) {
    lo[j] -= radius;
    hi[j] += radius;
  }
  return lattice_box(lo, hi);
}

Region Region::torus_complement(const FieldConfig& cfg, const std::vector<TorusPoint>& removed) {
  std::set<std::int64_t> drop;
  for (const auto& p : removed) drop.insert(site_index(p, cfg));
  std::vector<std::vector<Coord>> sites;
  std::vector<Coord> c(static_cast<std::size_t>(cfg.d()));
  for (std::int64_t idx = 0; idx < cfg.sites(); ++idx) {
    if (drop.count(idx) != 0) continue;
    site_coords(idx, cfg, c);
    sites.push_back(c);
  }
  return Region(cfg.d(), cfg.n(), std::move(sites));
}

bool Region::contains(std::span<const Coord> x) const {
  if (box_) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] < box_->first[j] || x[j] > box_->second[j]) return false;
    }
    return true;
  }
  return index_of(x).has_value();
}

std::optional<std::size_t> Region::index_of(std::span<const Coord> x) const {
  const std::vector<Coord> key(x.begin(), x.end());
  if (auto it = index_->find(key); it != index_->end()) return it->second;
  return std::nullopt;
}

void Region::for_each_neighbor(std::span<const Coord> x,
                               const std::function<void(std::span<const Coord>)>& visit) const {
  std::vector<Coord> y(x.begin(), x.end());
  for (int j = 0; j < d_; ++j) {
    auto& c = y[static_cast<std::size_t>(j)];
    const Coord orig = c;
    for (Coord step : {Coord{1}, Coord{-1}}) {
      c = orig + step;
      if (n_ > 0) c = ((c % n_) + n_) % n_;
      visit(y);
    }
    c = orig;
  }
}

std::vector<std::vector<Coord>> Region::exterior_boundary() const {
  std::set<std::vector<Coord>> out;
  for (const auto& s : sites_) {
    for_each_neighbor(s, [&](std::span<const Coord> z) {
      if (!contains(z)) out.emplace(z.begin(), z.end());
    });
  }
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------

struct KilledGreenSolve::Impl {
  Eigen::LLT<Eigen::MatrixXd> llt;
  std::vector<double> exit_time;
};

KilledGreenSolve::KilledGreenSolve(Region region) : region_(std::move(region)), impl_(std::make_unique<Impl>()) {
  const std::size_t m = region_.size();
  if (m == 0) throw Error(ErrorKind::kEmptyRegion, "killed Green's function needs a nonempty region");
  if (m > kMaxDenseRegion) {
    throw Error(ErrorKind::kResourceExhausted,
                "region of " + std::to_string(m) + " sites exceeds the dense-solve limit");
  }
  if (region_.modulus() > 0) {
    std::int64_t total = 1;
    for (int j = 0; j < region_.dim(); ++j) total *= region_.modulus();
    if (static_cast<std::int64_t>(m) == total) {
      throw Error(ErrorKind::kInvalidArgument, "exit time from the full torus is undefined");
    }
  }
  const double step = 1.0 / (2.0 * region_.dim());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    region_.for_each_neighbor(region_.sites()[i], [&](std::span<const Coord> z) {
      if (auto j = region_.index_of(z)) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*j)) -= step;
    });
  }
  impl_->llt.compute(a);
  if (impl_->llt.info() != Eigen::Success) {
    throw Error(ErrorKind::kNonConvergence, "I - P_V is singular for a proper subset (internal error)");
  }
  impl_->exit_time = solve(std::vector<double>(m, 1.0));
}

KilledGreenSolve::~KilledGreenSolve() = default;
KilledGreenSolve::KilledGreenSolve(KilledGreenSolve&&) noexcept = default;
KilledGreenSolve& KilledGreenSolve::operator=(KilledGreenSolve&&) noexcept = default;

std::vector<double> KilledGreenSolve::solve(std::vector<double> rhs) const {
  Eigen::Map<Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  Eigen::VectorXd x = impl_->llt.solve(b);
  return {x.data(), x.data() + x.size()};
}

double KilledGreenSolve::green(std::span<const Coord> x, std::span<const Coord> y) const {
  const auto ix = region_.index_of(x);
  const auto iy = region_.index_of(y);
  if (!ix || !iy) return 0.0;
  std::vector<double> rhs(region_.size(), 0.0);
  rhs[*iy] = 1.0;
  return solve(std::move(rhs))[*ix];
}

double KilledGreenSolve::expected_exit_time(std::span<const Coord> x) const {
  const auto ix = region_.index_of(x);
  return ix ? impl_->exit_time[*ix] : 0.0;
}

double KilledGreenSolve::exit_expectation(std::span<const Coord> x,
                                          const std::function<double(std::span<const Coord>)>& f) const {
  const auto ix = region_.index_of(x);
  if (!ix) return f(x);
  const double step = 1.0 / (2.0 * region_.dim());
  std::map<std::vector<Coord>, double> boundary_values;
  std::vector<double> rhs(region_.size(), 0.0);
  for (std::size_t i = 0; i < region_.size(); ++i) {
    region_.for_each_neighbor(region_.sites()[i], [&](std::span<const Coord> z) {
      if (region_.contains(z)) return;
      std::vector<Coord> key(z.begin(), z.end());
      auto it = boundary_values.find(key);
      if (it == boundary_values.end()) it = boundary_values.emplace(key, f(z)).first;
      rhs[i] += step * it->second;
    });
  }
  return solve(std::move(rhs))[*ix];
}

std::vector<std::pair<std::vector<Coord>, double>> KilledGreenSolve::harmonic_measure(std::span<const Coord> x) const {
  const auto ix = region_.index_of(x);
  if (!ix) return {{std::vector<Coord>(x.begin(), x.end()), 1.0}};
  // Row x of (I - P_V)^{-1}; the matrix is symmetric.
  std::vector<double> rhs(region_.size(), 0.0);
  rhs[*ix] = 1.0;
  const auto visits = solve(std::move(rhs));
  const double step = 1.0 / (2.0 * region_.dim());
  std::map<std::vector<Coord>, double> mass;
  for (std::size_t i = 0; i < region_.size(); ++i) {
    region_.for_each_neighbor(region_.sites()[i], [&](std::span<const Coord> z) {
      if (!region_.contains(z)) mass[std::vector<Coord>(z.begin(), z.end())] += step * visits[i];
    });
  }
  return {mass.begin(), mass.end()};
}

double killed_green(const Region& region, std::span<const Coord> x, std::span<const Coord> y) {
  if (!region.contains(x) || !region.contains(y)) return 0.0;
  return KilledGreenSolve(region).green(x, y);
}

}  // namespace zagff
