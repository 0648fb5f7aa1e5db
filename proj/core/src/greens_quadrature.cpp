#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "zagff/error.hpp"
#include "zagff/greens.hpp"

namespace zagff {

namespace {

constexpr int kGaussOrder = 8;
constexpr int kMaxPasses = 6;
constexpr int kMaxLevels = 200;

struct GaussRule {
  std::array<double, kGaussOrder> nodes{};    // on [0, 1]
  std::array<double, kGaussOrder> weights{};  // sum to 1
};

GaussRule make_gauss_rule() {
  GaussRule rule;
  const int q = kGaussOrder;
  for (int i = 0; i < q; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);
    rule.weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

const GaussRule& gauss_rule() {
  static const GaussRule rule = make_gauss_rule();
  return rule;
}

// Per-axis node data over one interval split into `cells` Gauss panels.
struct AxisNodes {
  std::vector<double> weight;     // includes the panel width
  std::vector<double> numerator;  // cos(x_j t)
  std::vector<double> denom;      // 1 - cos t = 2 sin^2(t/2)
};

AxisNodes axis_nodes(double a, double width, int cells, Coord xj) {
  const auto& rule = gauss_rule();
  AxisNodes ax;
  const double w = width / cells;
  const std::size_t total = static_cast<std::size_t>(cells) * kGaussOrder;
  ax.weight.reserve(total);
  ax.numerator.reserve(total);
  ax.denom.reserve(total);
  for (int c = 0; c < cells; ++c) {
    for (int i = 0; i < kGaussOrder; ++i) {
      const double t = a + w * (c + rule.nodes[static_cast<std::size_t>(i)]);
      const double s = std::sin(0.5 * t);
      ax.weight.push_back(w * rule.weights[static_cast<std::size_t>(i)]);
      ax.numerator.push_back(std::cos(static_cast<double>(xj) * t));
      ax.denom.push_back(2.0 * s * s);
    }
  }
  return ax;
}

// Sum over the tensor grid of w * prod(num) / sum(denom).
double tensor_sum(const std::vector<const AxisNodes*>& axes, std::size_t axis, double wprod, double dsum) {
  const AxisNodes& ax = *axes[axis];
  double total = 0.0;
  const std::size_t m = ax.weight.size();
  if (axis + 1 == axes.size()) {
    for (std::size_t i = 0; i < m; ++i) {
      total += wprod * ax.weight[i] * ax.numerator[i] / (dsum + ax.denom[i]);
    }
    return total;
  }
  for (std::size_t i = 0; i < m; ++i) {
    total += tensor_sum(axes, axis + 1, wprod * ax.weight[i] * ax.numerator[i], dsum + ax.denom[i]);
  }
  return total;
}

// One full evaluation at resolution multiplier `mult`. The quarter-domain
// [0, pi]^d is split into dyadic shells [0, 2h]^d \ [0, h]^d; each shell is
// a union of 2^d - 1 boxes, each box covered by cells^d Gauss panels.
double integrate_once(std::span<const Coord> x, int mult) {
  const int d = static_cast<int>(x.size());
  Coord xmax = 0;
  for (Coord c : x) xmax = std::max(xmax, c < 0 ? -c : c);

  // In the scale-invariant limit each shell carries 2^{2-d} of the previous.
  const double ratio = std::ldexp(1.0, 2 - d);
  double total = 0.0;
  double shell = 0.0;
  for (int level = 0; level < kMaxLevels; ++level) {
    const double h = std::numbers::pi / std::ldexp(1.0, level + 1);
    const int cells = mult * std::max(1, static_cast<int>(std::ceil(static_cast<double>(xmax) * h / 3.0)));
    std::vector<AxisNodes> lower, upper;
    lower.reserve(static_cast<std::size_t>(d));
    upper.reserve(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      lower.push_back(axis_nodes(0.0, h, cells, x[static_cast<std::size_t>(j)]));
      upper.push_back(axis_nodes(h, h, cells, x[static_cast<std::size_t>(j)]));
    }
    shell = 0.0;
    std::vector<const AxisNodes*> axes(static_cast<std::size_t>(d));
    for (unsigned mask = 1; mask < (1u << d); ++mask) {
      for (int j = 0; j < d; ++j) {
        axes[static_cast<std::size_t>(j)] = (mask >> j) & 1u ? &upper[static_cast<std::size_t>(j)] : &lower[static_cast<std::size_t>(j)];
      }
      shell += tensor_sum(axes, 0, 1.0, 0.0);
    }
    total += shell;
    if (level > 4 && std::abs(shell) < 1e-17 * std::max(1.0, std::abs(total))) break;
  }
  total += shell * ratio / (1.0 - ratio);
  return total * d * std::pow(std::numbers::pi, -d);
}

}  // namespace

QuadratureResult green_zd_quadrature(const LatticePoint& x, double tol) {
  if (x.dim() < 3) {
    throw Error(ErrorKind::kUnsupportedDimension,
                "g_{Z^d} diverges for d=" + std::to_string(x.dim()) + " (need d >= 3)");
  }
  QuadratureResult result;
  double prev = integrate_once(x.coords(), 1);
  for (int pass = 1; pass <= kMaxPasses; ++pass) {
    const double next = integrate_once(x.coords(), 1 << pass);
    result.value = next;
    result.error_estimate = std::abs(next - prev);
    result.refinements = pass;
    if (result.error_estimate < tol) return result;
    prev = next;
  }
  throw Error(ErrorKind::kNonConvergence,
              "green_zd quadrature did not reach tolerance; achieved error estimate " +
                  std::to_string(result.error_estimate));
}

double green_zd(const LatticePoint& x) { return green_zd_quadrature(x).value; }

double green_origin(int d) {
  if (d == 3) return kGreenOriginD3;
  return green_zd(LatticePoint::origin(d));
}

double GreenZdCache::operator()(const LatticePoint& x) {
  std::vector<Coord> key(x.coords().begin(), x.coords().end());
  for (auto& c : key) c = c < 0 ? -c : c;
  std::sort(key.begin(), key.end());
  {
    std::lock_guard lock(mutex_);
    if (auto it = values_.find(key); it != values_.end()) return it->second;
  }
  const double value = green_zd_quadrature(LatticePoint(key), tol_).value;
  std::lock_guard lock(mutex_);
  values_.emplace(std::move(key), value);
  return value;
}

}  // namespace zagff
