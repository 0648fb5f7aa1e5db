#include "zagff/extremes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "zagff/error.hpp"

namespace zagff {

NormalizingConstants normalizing_constants(std::int64_t sites, double variance) {
  if (sites < 3) throw Error(ErrorKind::kInvalidArgument, "normalizing constants need N >= 3");
  if (!(variance > 0.0)) throw Error(ErrorKind::kInvalidArgument, "variance must be positive");
  const double log_n = std::log(static_cast<double>(sites));
  const double root = std::sqrt(2.0 * log_n);
  NormalizingConstants c;
  c.sites = sites;
  c.variance = variance;
  c.b = std::sqrt(variance) * (root - (std::log(log_n) + std::log(4.0 * std::numbers::pi)) / (2.0 * root));
  c.a = variance / c.b;
  return c;
}

double threshold(const NormalizingConstants& constants, double delta) noexcept {
  return constants.a * delta + constants.b;
}

PointPattern extract_point_pattern(const TorusField& field, const NormalizingConstants& constants, double floor) {
  if (constants.sites != field.cfg.sites()) {
    throw Error(ErrorKind::kInvalidArgument, "normalizing constants were built for a different N");
  }
  PointPattern pattern{field.cfg, constants, floor, {}};
  const int d = field.cfg.d();
  const double inv_n = 1.0 / field.cfg.n();
  std::vector<Coord> c(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    const double h = (field.values[i] - constants.b) / constants.a;
    if (!(h > floor)) continue;
    site_coords(static_cast<std::int64_t>(i), field.cfg, c);
    std::vector<double> loc(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) loc[static_cast<std::size_t>(j)] = static_cast<double>(c[static_cast<std::size_t>(j)]) * inv_n;
    pattern.points.push_back({std::move(loc), h, static_cast<std::int64_t>(i)});
  }
  return pattern;
}

void write_point_pattern_csv(const PointPattern& pattern, std::ostream& out) {
  const int d = pattern.cfg.d();
  for (int j = 1; j <= d; ++j) out << "loc_" << j << ',';
  out << "height\n";
  std::vector<const PointPattern::Point*> order;
  order.reserve(pattern.points.size());
  for (const auto& p : pattern.points) order.push_back(&p);
  std::stable_sort(order.begin(), order.end(), [](auto* x, auto* y) { return x->height > y->height; });
  char buf[40];
  for (const auto* p : order) {
    for (double v : p->location) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << buf << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", p->height);
    out << buf << '\n';
  }
}

FieldMaximum field_maximum(const TorusField& field, const NormalizingConstants& constants) {
  if (field.values.empty()) throw Error(ErrorKind::kInvalidArgument, "empty field");
  std::size_t best = 0;
  for (std::size_t i = 1; i < field.values.size(); ++i) {
    if (field.values[i] > field.values[best]) best = i;
  }
  const double raw = field.values[best];
  return {site_point(static_cast<std::int64_t>(best), field.cfg), raw, (raw - constants.b) / constants.a};
}

}  // namespace zagff
