#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <map>

#include "zagff/error.hpp"
#include "zagff/greens.hpp"
#include "zagff/rwalk.hpp"

namespace zagff {
namespace {

const LatticePoint kOrigin = LatticePoint::origin(3);

TEST(SimulateExit, SingleSiteExitsInOneStep) {
  const Region single = Region::lattice(3, {kOrigin});
  StreamRng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const auto s = simulate_exit(single, kOrigin.coords(), rng);
    EXPECT_EQ(s.exit_time, 1);
    Coord l1 = 0;
    for (Coord c : s.exit_site) l1 += std::abs(c);
    EXPECT_EQ(l1, 1);
  }
}

TEST(SimulateExit, StartOutsideRegion) {
  const Region single = Region::lattice(3, {kOrigin});
  StreamRng rng(3);
  const LatticePoint start{4, 0, 1};
  const auto s = simulate_exit(single, start.coords(), rng);
  EXPECT_EQ(s.exit_time, 0);
  EXPECT_EQ(s.exit_site, std::vector<Coord>(start.coords().begin(), start.coords().end()));
}

TEST(SimulateExit, StepBudgetIsAnError) {
  const FieldConfig cfg(3, 10);
  const Region u = Region::torus_complement(cfg, {TorusPoint({0, 0, 0}, cfg)});
  StreamRng rng(1);
  try {
    simulate_exit(u, std::vector<Coord>{5, 5, 5}, rng, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kStepBudgetExceeded);
  }
}

TEST(SimulateExit, BitReproducible) {
  const Region ball = Region::linf_ball(kOrigin, 2);
  StreamRng a(99), b(99);
  for (int i = 0; i < 100; ++i) {
    const auto x = simulate_exit(ball, kOrigin.coords(), a);
    const auto y = simulate_exit(ball, kOrigin.coords(), b);
    EXPECT_EQ(x.exit_time, y.exit_time);
    EXPECT_EQ(x.exit_site, y.exit_site);
  }
}

TEST(ExpectedExitTime, SingleSiteIsExactlyOne) {
  const auto est = expected_exit_time_mc(Region::lattice(3, {kOrigin}), kOrigin.coords(), 1000, SeedPolicy{1});
  EXPECT_EQ(est.mean, 1.0);
  EXPECT_EQ(est.std_error, 0.0);
  EXPECT_EQ(est.replicates, 1000);
  EXPECT_THROW(expected_exit_time_mc(Region::lattice(3, {kOrigin}), kOrigin.coords(), 10, SeedPolicy{1}), Error);
}

TEST(ExpectedExitTime, CubeMatchesExactSolve) {
  const Region cube = Region::linf_ball(kOrigin, 1);
  const double exact = KilledGreenSolve(cube).expected_exit_time(kOrigin.coords());
  const auto est = expected_exit_time_mc(cube, kOrigin.coords(), 1'000'000, SeedPolicy{21});
  EXPECT_NEAR(est.mean, exact, 3 * est.std_error);
}

TEST(ExpectedExitTime, TorusBoxBoundAndExactSolve) {
  const int n = 10;
  const FieldConfig cfg(3, n);
  const Region v = Region::torus_box(cfg, LatticePoint{1, 1, 1}, LatticePoint{n - 2, n - 2, n - 2});
  const std::vector<Coord> center{n / 2, n / 2, n / 2};
  const double exact = KilledGreenSolve(v).expected_exit_time(center);
  const auto est = expected_exit_time_mc(v, center, 20000, SeedPolicy{4});
  EXPECT_NEAR(est.mean, exact, 3 * est.std_error);
  EXPECT_LE(est.mean, exit_time_bound(n, 3));
  EXPECT_NEAR(exit_time_bound(n, 3), 373.3, 0.05);
}

TEST(ExitDistribution, SingleSiteIsUniform) {
  const auto dist = exit_distribution_mc(Region::lattice(3, {kOrigin}), kOrigin.coords(), 1'000'000, SeedPolicy{8});
  ASSERT_EQ(dist.entries.size(), 6u);
  double total = 0.0;
  for (const auto& e : dist.entries) {
    EXPECT_NEAR(e.frequency, 1.0 / 6.0, 3 * e.std_error);
    total += e.frequency;
  }
  EXPECT_DOUBLE_EQ(total, 1.0);
}

TEST(ExitDistribution, BallMatchesHarmonicMeasure) {
  const Region ball = Region::l1_ball(kOrigin, 1);
  const auto exact = KilledGreenSolve(ball).harmonic_measure(kOrigin.coords());
  std::map<std::vector<Coord>, double> want(exact.begin(), exact.end());
  const auto dist = exit_distribution_mc(ball, kOrigin.coords(), 1'000'000, SeedPolicy{13});
  double total = 0.0;
  for (const auto& e : dist.entries) {
    ASSERT_TRUE(want.count(e.site)) << "exit site outside the exterior boundary";
    EXPECT_FALSE(ball.contains(e.site));
    EXPECT_NEAR(e.frequency, want[e.site], 3 * e.std_error);
    total += e.frequency;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Estimators, IndependentOfWorkerCount) {
  const Region ball = Region::linf_ball(kOrigin, 2);
  setenv("ZAGFF_THREADS", "1", 1);
  const auto one = expected_exit_time_mc(ball, kOrigin.coords(), 5000, SeedPolicy{2});
  const auto visits_one = origin_visits_mc(3, 2000, 200, SeedPolicy{2});
  setenv("ZAGFF_THREADS", "4", 1);
  const auto four = expected_exit_time_mc(ball, kOrigin.coords(), 5000, SeedPolicy{2});
  const auto visits_four = origin_visits_mc(3, 2000, 200, SeedPolicy{2});
  unsetenv("ZAGFF_THREADS");
  EXPECT_EQ(one.mean, four.mean);
  EXPECT_EQ(one.std_error, four.std_error);
  EXPECT_EQ(visits_one.mean, visits_four.mean);
}

}  // namespace
}  // namespace zagff
