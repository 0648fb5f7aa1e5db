#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "zagff/greens.hpp"
#include "zagff/lattice.hpp"
#include "zagff/rng.hpp"

namespace zagff {

/// Default cap on walk length before simulate_exit gives up.
inline constexpr std::int64_t kDefaultStepBudget = 100'000'000;

/// First site outside the region and the step at which it was reached.
struct ExitSample {
  std::vector<Coord> exit_site;
  std::int64_t exit_time = 0;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t replicates = 0;
};

/// Discrete-time simple random walk from `start` until it leaves `region`.
/// Each step consumes one 64-bit draw reduced mod 2d: direction k moves
/// axis k/2 by +1 (k even) or -1 (k odd). Throws kStepBudgetExceeded rather
/// than truncating.
ExitSample simulate_exit(const Region& region, std::span<const Coord> start, StreamRng& rng,
                         std::int64_t max_steps = kDefaultStepBudget);

/// Sample mean and standard error of T_V over `replicates` walks; replicate i
/// uses the stream policy.derive(i). Requires replicates >= 100.
McEstimate expected_exit_time_mc(const Region& region, std::span<const Coord> start, std::int64_t replicates,
                                 const SeedPolicy& policy, std::int64_t max_steps = kDefaultStepBudget);

struct ExitDistribution {
  struct Entry {
    std::vector<Coord> site;
    double frequency;
    double std_error;
  };
  /// Sorted by site.
  std::vector<Entry> entries;
  std::int64_t replicates = 0;
};

/// Empirical law of X_{T_V}.
ExitDistribution exit_distribution_mc(const Region& region, std::span<const Coord> start, std::int64_t replicates,
                                      const SeedPolicy& policy, std::int64_t max_steps = kDefaultStepBudget);

/// Visits to the origin at times 0..steps by walks on Z^d started at the
/// origin; the mean estimates the truncated Green's function
/// sum_{t <= steps} P^t(0, 0).
McEstimate origin_visits_mc(int d, std::int64_t walks, std::int64_t steps, const SeedPolicy& policy);

}  // namespace zagff
