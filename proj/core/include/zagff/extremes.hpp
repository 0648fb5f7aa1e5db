#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "zagff/lattice.hpp"
#include "zagff/sampler.hpp"

namespace zagff {

/// Centering b_N and scaling a_N of the i.i.d. N(0, v) maximum:
///   b_N = sqrt(v) [sqrt(2 log N) - (log log N + log 4 pi) / (2 sqrt(2 log N))]
///   a_N = v / b_N
struct NormalizingConstants {
  std::int64_t sites = 0;
  double variance = 0.0;
  double b = 0.0;
  double a = 0.0;
};

NormalizingConstants normalizing_constants(std::int64_t sites, double variance);

/// u_N(delta) = a_N delta + b_N.
double threshold(const NormalizingConstants& constants, double delta) noexcept;

/// Storage cutoff used when no floor is given.
inline constexpr double kDefaultFloor = -10.0;

/// Points of the extremal process above a storage floor.
struct PointPattern {
  struct Point {
    std::vector<double> location;  // alpha / n in [0, 1)^d
    double height;                 // (Psi(alpha) - b_N) / a_N
    std::int64_t site;
  };
  FieldConfig cfg;
  NormalizingConstants constants;
  double floor = kDefaultFloor;
  /// Site order.
  std::vector<Point> points;
};

PointPattern extract_point_pattern(const TorusField& field, const NormalizingConstants& constants,
                                   double floor = kDefaultFloor);

/// CSV `loc_1,...,loc_d,height`, highest first.
void write_point_pattern_csv(const PointPattern& pattern, std::ostream& out);

struct FieldMaximum {
  TorusPoint site;
  double raw = 0.0;
  double rescaled = 0.0;
};

/// Argmax with ties resolved toward the lexicographically smallest site.
FieldMaximum field_maximum(const TorusField& field, const NormalizingConstants& constants);

}  // namespace zagff
