#include <cmath>

#include "zagff/error.hpp"
#include "zagff/greens.hpp"

namespace zagff {

double verify_spatial_markov_zd(const Region& region, const LatticePoint& x, const LatticePoint& y,
                                GreenZdCache& green) {
  if (region.modulus() != 0) throw Error(ErrorKind::kInvalidArgument, "spatial Markov check needs a Z^d region");
  if (x.dim() != region.dim() || y.dim() != region.dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "point and region dimensions differ");
  }
  const double full = green(x, y);
  if (!region.contains(x.coords())) {
    // T_V = 0: g^V vanishes and X_{T_V} = x.
    return std::abs(full - 0.0 - full);
  }
  const KilledGreenSolve solve(region);
  const double killed = solve.green(x.coords(), y.coords());
  const double exit_term = solve.exit_expectation(x.coords(), [&](std::span<const Coord> z) {
    return green(LatticePoint(std::vector<Coord>(z.begin(), z.end())), y);
  });
  return std::abs(full - killed - exit_term);
}

double verify_markov_decomposition_torus(const GreenTable& table, const Region& region, const TorusPoint& x,
                                         const TorusPoint& y) {
  const auto& cfg = table.config();
  if (region.modulus() != cfg.n() || region.dim() != cfg.d()) {
    throw Error(ErrorKind::kInvalidArgument, "region does not live on this torus");
  }
  const double full = table.covariance(x, y);
  if (!region.contains(x.coords())) {
    return std::abs(full - 0.0 - full + 0.0);
  }
  const KilledGreenSolve solve(region);
  const double killed = solve.green(x.coords(), y.coords());
  const double exit_term = solve.exit_expectation(x.coords(), [&](std::span<const Coord> z) {
    return table.covariance(TorusPoint(std::vector<Coord>(z.begin(), z.end()), cfg), y);
  });
  const double exit_time = solve.expected_exit_time(x.coords());
  return std::abs(full - killed - exit_term + exit_time / static_cast<double>(cfg.sites()));
}

}  // namespace zagff
