#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <string>

#include "fft.hpp"
#include "zagff/error.hpp"
#include "zagff/greens.hpp"

namespace zagff {

namespace detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

InverseRealFft::InverseRealFft(const FieldConfig& cfg)
    : real_size_(static_cast<std::size_t>(cfg.sites())), half_last_(cfg.n() / 2 + 1) {
  half_size_ = real_size_ / static_cast<std::size_t>(cfg.n()) * static_cast<std::size_t>(half_last_);
  std::vector<int> dims(static_cast<std::size_t>(cfg.d()), cfg.n());
  auto in = make_half();
  auto out = make_real();
  std::lock_guard lock(planner_mutex());
  plan_ = fftw_plan_dft_c2r(cfg.d(), dims.data(), in.get(), out.get(), FFTW_ESTIMATE);
  if (plan_ == nullptr) throw Error(ErrorKind::kResourceExhausted, "FFTW could not create a plan");
}

InverseRealFft::~InverseRealFft() {
  std::lock_guard lock(planner_mutex());
  if (plan_ != nullptr) fftw_destroy_plan(plan_);
}

FftwBuffer<fftw_complex> InverseRealFft::make_half() const {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * half_size_));
  if (p == nullptr) throw Error(ErrorKind::kResourceExhausted, "out of memory for spectral buffer");
  return FftwBuffer<fftw_complex>(p);
}

FftwBuffer<double> InverseRealFft::make_real() const {
  auto* p = static_cast<double*>(fftw_malloc(sizeof(double) * real_size_));
  if (p == nullptr) throw Error(ErrorKind::kResourceExhausted, "out of memory for field buffer");
  return FftwBuffer<double>(p);
}

void InverseRealFft::execute(fftw_complex* half, double* out) const { fftw_execute_dft_c2r(plan_, half, out); }

}  // namespace detail

std::vector<double> laplacian_eigenvalues(const FieldConfig& cfg) {
  const int n = cfg.n();
  const int d = cfg.d();
  std::vector<double> one_minus_cos(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double s = std::sin(std::numbers::pi * k / n);
    one_minus_cos[static_cast<std::size_t>(k)] = 2.0 * s * s;
  }
  std::vector<double> lambda(static_cast<std::size_t>(cfg.sites()));
  std::vector<Coord> k(static_cast<std::size_t>(d));
  for (std::int64_t idx = 0; idx < cfg.sites(); ++idx) {
    site_coords(idx, cfg, k);
    double s = 0.0;
    for (Coord kj : k) s += one_minus_cos[static_cast<std::size_t>(kj)];
    lambda[static_cast<std::size_t>(idx)] = s / d;
  }
  return lambda;
}

GreenTable::GreenTable(FieldConfig cfg, std::vector<double> values, std::vector<double> eigenvalues)
    : cfg_(cfg), values_(std::move(values)), eigenvalues_(std::move(eigenvalues)) {
  if (values_.size() != static_cast<std::size_t>(cfg_.sites()) ||
      eigenvalues_.size() != static_cast<std::size_t>(cfg_.sites())) {
    throw Error(ErrorKind::kInvalidArgument, "green table size does not match N");
  }
}

double GreenTable::at(const TorusPoint& displacement) const {
  return values_[static_cast<std::size_t>(site_index(displacement, cfg_))];
}

double GreenTable::covariance(const TorusPoint& x, const TorusPoint& y) const { return at(x + (-y)); }

double GreenTable::covariance_index(std::int64_t x, std::int64_t y) const {
  const int n = cfg_.n();
  std::int64_t idx = 0;
  std::int64_t stride = 1;
  for (int j = 0; j < cfg_.d(); ++j) {
    const std::int64_t xj = x % n;
    const std::int64_t yj = y % n;
    x /= n;
    y /= n;
    idx += ((xj - yj + n) % n) * stride;
    stride *= n;
  }
  return values_[static_cast<std::size_t>(idx)];
}

GreenTable GreenTable::with_origin_offset(double delta) const {
  GreenTable copy = *this;
  copy.values_.front() += delta;
  return copy;
}

GreenTable zero_average_green(const FieldConfig& cfg) {
  auto lambda = laplacian_eigenvalues(cfg);
  detail::InverseRealFft fft(cfg);
  auto half = fft.make_half();
  auto out = fft.make_real();

  const int n = cfg.n();
  const int hl = fft.half_last();
  const std::size_t rows = static_cast<std::size_t>(cfg.sites() / n);
  for (std::size_t r = 0; r < rows; ++r) {
    for (int kd = 0; kd < hl; ++kd) {
      const std::size_t full = r * static_cast<std::size_t>(n) + static_cast<std::size_t>(kd);
      const std::size_t h = r * static_cast<std::size_t>(hl) + static_cast<std::size_t>(kd);
      half[h][0] = full == 0 ? 0.0 : 1.0 / lambda[full];
      half[h][1] = 0.0;
    }
  }
  fft.execute(half.get(), out.get());

  const double inv_n = 1.0 / static_cast<double>(cfg.sites());
  std::vector<double> values(static_cast<std::size_t>(cfg.sites()));
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = out[i] * inv_n;
  return GreenTable(cfg, std::move(values), std::move(lambda));
}

void write_green_table_csv(const GreenTable& table, std::ostream& out) {
  const auto& cfg = table.config();
  for (int j = 1; j <= cfg.d(); ++j) out << 'x' << j << ',';
  out << "G_value\n";
  std::vector<Coord> c(static_cast<std::size_t>(cfg.d()));
  char buf[40];
  for (std::int64_t idx = 0; idx < cfg.sites(); ++idx) {
    site_coords(idx, cfg, c);
    for (Coord v : c) out << v << ',';
    std::snprintf(buf, sizeof buf, "%.17g", table.at_index(idx));
    out << buf << '\n';
  }
}

DecayProfile decay_profile_torus(const GreenTable& table) {
  const auto& cfg = table.config();
  DecayProfile profile;
  profile.n = cfg.n();
  profile.d = cfg.d();
  const double log_factor = std::pow(std::log(static_cast<double>(cfg.n())), 1.5 * cfg.d());
  std::map<std::int64_t, double> by_distance;
  std::vector<Coord> c(static_cast<std::size_t>(cfg.d()));
  for (std::int64_t idx = 0; idx < cfg.sites(); ++idx) {
    site_coords(idx, cfg, c);
    std::int64_t dist = 0;
    for (Coord v : c) dist += std::min<Coord>(v, cfg.n() - v);
    const double g = std::abs(table.at_index(idx));
    auto& slot = by_distance[dist];
    slot = std::max(slot, g);
    if (dist > 0) {
      const double envelope = log_factor * std::pow(static_cast<double>(dist), 2.0 - cfg.d());
      profile.fitted_constant = std::max(profile.fitted_constant, g / envelope);
    }
  }
  for (const auto& [dist, g] : by_distance) profile.rows.push_back({dist, g});
  return profile;
}

ConvergenceReport convergence_report(const std::vector<int>& n_list, int d) {
  ConvergenceReport report;
  report.d = d;
  if (n_list.empty()) throw Error(ErrorKind::kInvalidArgument, "empty n list");
  for (int n : n_list) {
    if (n < 3) throw Error(ErrorKind::kInvalidArgument, "convergence report needs n >= 3");
  }
  const double v = green_zd(LatticePoint::origin(d));
  std::vector<int> sorted = n_list;
  std::sort(sorted.begin(), sorted.end());
  for (int n : sorted) {
    const FieldConfig cfg(d, n);
    const double v_n = zero_average_green(cfg).origin();
    const double bound = std::pow(std::log(static_cast<double>(n)), 1.5 * d) * std::pow(static_cast<double>(n), 2.0 - d);
    report.rows.push_back({n, v_n, v, std::abs(v_n - v), bound});
  }
  report.gaps_strictly_decreasing = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    if (!(report.rows[i].gap < report.rows[i - 1].gap)) report.gaps_strictly_decreasing = false;
  }
  return report;
}

double exit_time_bound(int n, int d) {
  const double r = n * std::sqrt(static_cast<double>(d)) + 2.0;
  return r * r;
}

}  // namespace zagff
