#include "zagff/rwalk.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>

#include "zagff/error.hpp"
#include "zagff/parallel.hpp"

namespace zagff {

namespace {

constexpr std::int64_t kChunk = 1024;

// Reduces per-chunk (sum, sum of squares) in chunk order so the result does
// not depend on how chunks were scheduled.
template <class PerReplicate>
McEstimate chunked_mean(std::int64_t replicates, PerReplicate&& value) {
  const std::int64_t chunks = (replicates + kChunk - 1) / kChunk;
  std::vector<double> sums(static_cast<std::size_t>(chunks)), sqs(static_cast<std::size_t>(chunks));
  parallel_for(chunks, [&](std::int64_t c) {
    double s = 0.0, q = 0.0;
    const std::int64_t end = std::min(replicates, (c + 1) * kChunk);
    for (std::int64_t i = c * kChunk; i < end; ++i) {
      const double v = value(i);
      s += v;
      q += v * v;
    }
    sums[static_cast<std::size_t>(c)] = s;
    sqs[static_cast<std::size_t>(c)] = q;
  });
  double s = 0.0, q = 0.0;
  for (std::size_t c = 0; c < sums.size(); ++c) {
    s += sums[c];
    q += sqs[c];
  }
  McEstimate est;
  est.replicates = replicates;
  est.mean = s / static_cast<double>(replicates);
  if (replicates > 1) {
    const double var = std::max(0.0, (q - s * est.mean) / static_cast<double>(replicates - 1));
    est.std_error = std::sqrt(var / static_cast<double>(replicates));
  }
  return est;
}

}  // namespace

ExitSample simulate_exit(const Region& region, std::span<const Coord> start, StreamRng& rng, std::int64_t max_steps) {
  const int d = region.dim();
  if (static_cast<int>(start.size()) != d) throw Error(ErrorKind::kDimensionMismatch, "start point dimension mismatch");
  const int n = region.modulus();
  const std::uint64_t directions = 2u * static_cast<std::uint64_t>(d);
  ExitSample out;
  out.exit_site.assign(start.begin(), start.end());
  auto& pos = out.exit_site;
  std::int64_t t = 0;
  while (region.contains(pos)) {
    if (t == max_steps) {
      throw Error(ErrorKind::kStepBudgetExceeded,
                  "walk did not exit within " + std::to_string(max_steps) + " steps");
    }
    const std::uint64_t dir = rng.next_u64() % directions;
    auto& c = pos[static_cast<std::size_t>(dir >> 1)];
    c += (dir & 1u) ? -1 : 1;
    if (n > 0) c = (c + n) % n;
    ++t;
  }
  out.exit_time = t;
  return out;
}

McEstimate expected_exit_time_mc(const Region& region, std::span<const Coord> start, std::int64_t replicates,
                                 const SeedPolicy& policy, std::int64_t max_steps) {
  if (replicates < 100) throw Error(ErrorKind::kInvalidArgument, "expected_exit_time_mc needs at least 100 replicates");
  return chunked_mean(replicates, [&](std::int64_t i) {
    StreamRng rng(policy.derive(static_cast<std::uint64_t>(i)));
    return static_cast<double>(simulate_exit(region, start, rng, max_steps).exit_time);
  });
}

ExitDistribution exit_distribution_mc(const Region& region, std::span<const Coord> start, std::int64_t replicates,
                                      const SeedPolicy& policy, std::int64_t max_steps) {
  if (replicates < 1) throw Error(ErrorKind::kInvalidArgument, "need at least one replicate");
  const std::int64_t chunks = (replicates + kChunk - 1) / kChunk;
  std::vector<std::map<std::vector<Coord>, std::int64_t>> partial(static_cast<std::size_t>(chunks));
  parallel_for(chunks, [&](std::int64_t c) {
    auto& counts = partial[static_cast<std::size_t>(c)];
    const std::int64_t end = std::min(replicates, (c + 1) * kChunk);
    for (std::int64_t i = c * kChunk; i < end; ++i) {
      StreamRng rng(policy.derive(static_cast<std::uint64_t>(i)));
      ++counts[simulate_exit(region, start, rng, max_steps).exit_site];
    }
  });
  std::map<std::vector<Coord>, std::int64_t> counts;
  for (const auto& p : partial) {
    for (const auto& [site, k] : p) counts[site] += k;
  }
  ExitDistribution dist;
  dist.replicates = replicates;
  const double m = static_cast<double>(replicates);
  for (const auto& [site, k] : counts) {
    const double f = static_cast<double>(k) / m;
    dist.entries.push_back({site, f, std::sqrt(f * (1.0 - f) / m)});
  }
  return dist;
}

McEstimate origin_visits_mc(int d, std::int64_t walks, std::int64_t steps, const SeedPolicy& policy) {
  if (d < 1 || d > 16) throw Error(ErrorKind::kInvalidArgument, "origin_visits_mc supports 1 <= d <= 16");
  if (walks < 1 || steps < 0) throw Error(ErrorKind::kInvalidArgument, "need walks >= 1 and steps >= 0");
  const std::uint64_t directions = 2u * static_cast<std::uint64_t>(d);
  return chunked_mean(walks, [&](std::int64_t i) {
    StreamRng rng(policy.derive(static_cast<std::uint64_t>(i)));
    std::array<std::int64_t, 16> pos{};
    int nonzero = 0;
    std::int64_t visits = 1;
    for (std::int64_t t = 0; t < steps; ++t) {
      const std::uint64_t dir = rng.next_u64() % directions;
      auto& c = pos[static_cast<std::size_t>(dir >> 1)];
      if (c == 0) ++nonzero;
      c += (dir & 1u) ? -1 : 1;
      if (c == 0) --nonzero;
      if (nonzero == 0) ++visits;
    }
    return static_cast<double>(visits);
  });
}

}  // namespace zagff
