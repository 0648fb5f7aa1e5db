// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Tolerances and problem sizes are fixed here.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oracles/pseudo_inverse.hpp"
#include "oracles/return_series.hpp"
#include "zagff/cli/cli.hpp"
#include "zagff/extremes.hpp"
#include "zagff/greens.hpp"
#include "zagff/rwalk.hpp"
#include "zagff/sampler.hpp"
#include "zagff/stats.hpp"

namespace fs = std::filesystem;
using namespace zagff;

namespace {

struct Outcome {
  bool passed = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    passed = passed && ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string g(double v, int digits = 7) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void runtime(Outcome& o, const Stopwatch& w, double limit) {
  o.require(w.seconds() < limit, "runtime " + g(w.seconds(), 3) + " s < " + g(limit) + " s");
}

// 1 -------------------------------------------------------------------------
Outcome spectral_vs_pseudo_inverse() {
  Outcome o;
  Stopwatch w;
  for (int n : {3, 4, 5}) {
    const FieldConfig cfg(3, n);
    const auto table = zero_average_green(cfg);
    const auto oracle = oracle::torus_pseudo_inverse(3, n);
    double worst = 0.0;
    for (std::int64_t x = 0; x < cfg.sites(); ++x) {
      for (std::int64_t y = 0; y < cfg.sites(); ++y) {
        worst = std::max(worst, std::abs(table.covariance_index(x, y) - oracle(x, y)));
      }
    }
    o.require(worst <= 1e-10, "n=" + std::to_string(n) + " max entrywise diff " + g(worst, 3) + " <= 1e-10");
  }
  runtime(o, w, 10);
  return o;
}

// 2 -------------------------------------------------------------------------
Outcome golden_constant() {
  Outcome o;
  Stopwatch w;
  const auto quad = green_zd_quadrature(LatticePoint::origin(3));
  const double series = static_cast<double>(oracle::green_origin_d3_series(2'000'000).value());

  // Visits to the origin at times 0..T, plus sum_{m > T/2} 2 (3 / (4 pi m))^{3/2}
  // from the local limit theorem for the untracked tail.
  const std::int64_t walks = 4'000'000;
  const std::int64_t steps = 1000;
  const auto visits = origin_visits_mc(3, walks, steps, SeedPolicy{20260101});
  const double c = 2.0 * std::pow(3.0 / (4.0 * std::numbers::pi), 1.5);
  const double tail = c * 2.0 / std::sqrt(steps / 2.0 + 0.5);
  const double mc = visits.mean + tail;

  o.details.push_back("     quadrature " + g(quad.value, 10) + ", return series " + g(series, 10) + ", MC " + g(mc, 7) +
                      " (SE " + g(visits.std_error, 2) + ", tail " + g(tail, 4) + ")");
  o.require(std::abs(quad.value - series) <= 1e-3, "|quadrature - series| = " + g(std::abs(quad.value - series), 3));
  o.require(std::abs(quad.value - mc) <= 1e-3, "|quadrature - MC| = " + g(std::abs(quad.value - mc), 3));
  o.require(std::abs(series - mc) <= 1e-3, "|series - MC| = " + g(std::abs(series - mc), 3));
  o.require(std::abs(quad.value - kGreenOriginD3) <= 1e-6,
            "|quadrature - 1.5163861| = " + g(std::abs(quad.value - kGreenOriginD3), 3) + " <= 1e-6");
  runtime(o, w, 120);
  return o;
}

// 3 -------------------------------------------------------------------------
Outcome lemma_identities(const fs::path& workdir) {
  Outcome o;
  Stopwatch w;
  std::ostringstream sink;
  const int code = cli::run({"verify", "--n-list", "4,5", "--out", (workdir / "c3_verify").string(), "--force"}, sink,
                            sink);
  std::ifstream in(workdir / "c3_verify" / "report.json");
  const auto report = cli::verify_report_from_json(cli::Json::parse(in));
  double zd = 0.0, torus = 0.0;
  for (const auto& c : report.checks) {
    if (c.group == "spatial-markov-zd") {
      zd = std::max(zd, c.residual);
    } else if (c.group == "markov-decomposition-torus") {
      torus = std::max(torus, c.residual);
    }
  }
  GreenZdCache green;
  const auto origin = LatticePoint::origin(3);
  const auto e1 = LatticePoint::unit(3, 0);
  zd = std::max(zd, verify_spatial_markov_zd(Region::lattice(3, {origin}), origin, origin, green));
  zd = std::max(zd, verify_spatial_markov_zd(Region::l1_ball(origin, 2), origin, e1, green));
  {
    const FieldConfig cfg(3, 5);
    const auto table = zero_average_green(cfg);
    const Region u = Region::torus_complement(cfg, {TorusPoint({0, 0, 0}, cfg)});
    std::mt19937_64 gen(3);
    std::uniform_int_distribution<std::int64_t> site(0, cfg.sites() - 1);
    for (int i = 0; i < 20; ++i) {
      torus = std::max(torus, verify_markov_decomposition_torus(table, u, site_point(site(gen), cfg),
                                                                site_point(site(gen), cfg)));
    }
  }
  {
    const FieldConfig cfg(3, 4);
    const TorusPoint x({1, 1, 1}, cfg);
    torus = std::max(torus, verify_markov_decomposition_torus(
                                zero_average_green(cfg),
                                Region::torus_box(cfg, LatticePoint{1, 1, 1}, LatticePoint{2, 2, 2}), x, x));
  }
  o.require(code == 0 && report.all_passed, "verify suite exit code " + std::to_string(code));
  o.require(zd <= 1e-5, "Z^d spatial Markov max residual " + g(zd, 3) + " <= 1e-5");
  o.require(torus <= 1e-8, "torus decomposition max residual " + g(torus, 3) + " <= 1e-8");
  runtime(o, w, 60);
  return o;
}

// 4 -------------------------------------------------------------------------
Outcome zero_average() {
  Outcome o;
  std::map<int, std::unique_ptr<SpectralSampler>> samplers;
  std::mt19937_64 gen(4);
  std::uniform_int_distribution<int> side(2, 16);
  int violations = 0;
  double worst = 0.0;
  for (int i = 0; i < 10'000; ++i) {
    const int n = side(gen);
    auto& s = samplers[n];
    if (!s) s = std::make_unique<SpectralSampler>(FieldConfig(3, n));
    const auto f = s->sample(gen());
    double sum = 0.0, peak = 0.0;
    for (double v : f.values) {
      sum += v;
      peak = std::max(peak, std::abs(v));
    }
    const double rel = std::abs(sum) / (static_cast<double>(f.values.size()) * peak);
    worst = std::max(worst, rel);
    if (rel > 1e-9) ++violations;
  }
  o.require(violations == 0, "10^4 draws, max |sum|/(N max|psi|) = " + g(worst, 3) + " <= 1e-9");
  return o;
}

// 5 -------------------------------------------------------------------------
Outcome sampler_covariance() {
  Outcome o;
  Stopwatch w;
  const FieldConfig cfg(3, 6);
  const auto table = zero_average_green(cfg);
  const SpectralSampler sampler(cfg);
  const std::int64_t m = 50'000;
  const std::vector<std::vector<Coord>> disp = {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}, {1, 1, 0}, {1, 1, 1},
                                                {2, 0, 0}, {3, 0, 0}, {2, 1, 0}, {3, 3, 3}, {2, 2, 1}};
  std::vector<std::size_t> idx;
  for (const auto& x : disp) idx.push_back(static_cast<std::size_t>(site_index(TorusPoint(x, cfg), cfg)));
  double s00 = 0.0;
  std::vector<double> s(idx.size()), s2(idx.size());
  const SeedPolicy policy{5};
  for (std::int64_t r = 0; r < m; ++r) {
    const auto f = sampler.sample(policy.derive(static_cast<std::uint64_t>(r)));
    s00 += f.values[0] * f.values[0];
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const double p = f.values[0] * f.values[idx[k]];
      s[k] += p;
      s2[k] += p * p;
    }
  }
  const double g00 = table.origin();
  const double var = s00 / m;
  const double tol = 3 * std::sqrt(2.0 / m) * g00;
  o.require(std::abs(var - g00) <= tol,
            "Var(psi(0)) " + g(var) + " vs G(0,0) " + g(g00) + ", |diff| " + g(std::abs(var - g00), 3) + " <= " + g(tol, 3));
  double worst_z = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const double mean = s[k] / m;
    const double se = std::sqrt((s2[k] / m - mean * mean) / m);
    worst_z = std::max(worst_z, std::abs(mean - table.at_index(static_cast<std::int64_t>(idx[k]))) / se);
  }
  o.require(worst_z <= 4.0, "10 displacement covariances, max |z| = " + g(worst_z, 3) + " <= 4");
  runtime(o, w, 300);
  return o;
}

// 6 -------------------------------------------------------------------------
Outcome convergence() {
  Outcome o;
  Stopwatch w;
  const auto r = convergence_report({4, 8, 16, 32}, 3);
  std::string gaps;
  for (const auto& row : r.rows) gaps += (gaps.empty() ? "" : ", ") + g(row.gap, 5);
  o.require(r.gaps_strictly_decreasing, "gaps strictly decreasing over n=4,8,16,32: " + gaps);
  o.require(r.rows.back().gap <= 0.08, "gap(32) = " + g(r.rows.back().gap, 5) + " <= 0.08");
  std::vector<double> scaled;
  for (std::size_t i = 1; i < r.rows.size(); ++i) scaled.push_back(r.rows[i].n * r.rows[i].gap);
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  const double spread = *hi / *lo - 1.0;
  o.require(spread < 0.30, "n*gap over n=8,16,32 in [" + g(*lo, 5) + ", " + g(*hi, 5) + "], spread " + g(spread, 3) +
                               " < 0.30");
  runtime(o, w, 120);
  return o;
}

// 7 -------------------------------------------------------------------------
Outcome exit_time() {
  Outcome o;
  Stopwatch w;
  const int n = 10;
  const FieldConfig cfg(3, n);
  const Region v = Region::torus_box(cfg, LatticePoint{1, 1, 1}, LatticePoint{n - 2, n - 2, n - 2});
  const std::vector<Coord> center{n / 2, n / 2, n / 2};
  const double exact = KilledGreenSolve(v).expected_exit_time(center);
  const auto est = expected_exit_time_mc(v, center, 20'000, SeedPolicy{7});
  const double bound = exit_time_bound(n, 3);
  o.require(std::abs(est.mean - exact) <= 3 * est.std_error, "MC " + g(est.mean) + " (SE " + g(est.std_error, 3) +
                                                                  ") vs exact " + g(exact) + " within 3 SE");
  o.require(est.mean <= bound, "MC " + g(est.mean) + " <= (n sqrt3 + 2)^2 = " + g(bound, 5));
  runtime(o, w, 60);
  return o;
}

struct Sizes {
  std::map<int, std::unique_ptr<SpectralSampler>> samplers;
  const SpectralSampler& get(int n) {
    auto& s = samplers[n];
    if (!s) s = std::make_unique<SpectralSampler>(FieldConfig(3, n));
    return *s;
  }
};

NormalizingConstants constants_for(const SpectralSampler& s) {
  return normalizing_constants(s.config().sites(), kGreenOriginD3);
}

// 8 -------------------------------------------------------------------------
Outcome gumbel(Sizes& sizes) {
  Outcome o;
  Stopwatch w;
  const SeedPolicy policy{8};
  const auto& s24 = sizes.get(24);
  const auto& s8 = sizes.get(8);
  const auto r24 = gumbel_experiment(s24, constants_for(s24), 2000, policy);
  const auto r8 = gumbel_experiment(s8, constants_for(s8), 2000, policy);
  o.require(r24.ks <= 0.10, "n=24 KS distance " + g(r24.ks, 4) + " <= 0.10");
  o.require(r24.ks < r8.ks, "D(24) = " + g(r24.ks, 4) + " < D(8) = " + g(r8.ks, 4));
  runtime(o, w, 600);
  return o;
}

// 9 -------------------------------------------------------------------------
Outcome poisson(Sizes& sizes) {
  Outcome o;
  Stopwatch w;
  const auto& s = sizes.get(24);
  const auto c = constants_for(s);
  BatteryConfig config;
  config.deltas = {0.0};
  config.split = CellSplit{{2, 1, 1}};
  config.laplace = {IndicatorFunction::whole_torus(3, 1.0, 0.0)};
  const std::int64_t m = 10'000;
  const auto records = run_battery(s, c, m, SeedPolicy{9}, config);
  std::vector<std::int64_t> counts, cells;
  std::vector<double> terms;
  for (const auto& r : records) {
    counts.push_back(r.counts[0]);
    cells.insert(cells.end(), r.cell_counts.begin(), r.cell_counts.end());
    terms.push_back(r.laplace_terms[0]);
  }
  const double level = threshold(c, 0.0);
  const auto p = poisson_report_from_counts(0.0, level, counts, config.split, cells,
                                            finite_n_exceedance_mean(c.sites, s.site_variance(), level));
  const auto l = laplace_report_from_terms(config.laplace[0].describe(), terms, config.laplace[0].limit_laplace());
  o.require(std::abs(p.mean - p.finite_n_mean) <= 3 * p.std_error,
            "mean count " + g(p.mean, 5) + " vs finite-N " + g(p.finite_n_mean, 5) + " within 3 SE (" +
                g(3 * p.std_error, 3) + ")");
  o.require(std::abs(p.mean - 1.0) <= 0.15, "mean count " + g(p.mean, 5) + " within 0.15 of 1");
  o.require(p.dispersion >= 0.85 && p.dispersion <= 1.15, "dispersion " + g(p.dispersion, 4) + " in [0.85, 1.15]");
  o.require(p.max_abs_cell_correlation <= 0.05,
            "half-torus cell correlation " + g(p.max_abs_cell_correlation, 3) + " <= 0.05");
  o.require(std::abs(l.empirical - *l.limit) <= 3 * l.std_error,
            "Laplace " + g(l.empirical, 5) + " vs " + g(*l.limit) + " within 3 SE (" + g(3 * l.std_error, 3) + ")");
  runtime(o, w, 900);
  return o;
}

// 10 ------------------------------------------------------------------------
Outcome boundary(Sizes& sizes) {
  Outcome o;
  Stopwatch w;
  const SeedPolicy policy{10};
  std::map<int, BoundaryReport> r;
  for (int n : {32, 64}) {
    const auto& s = sizes.get(n);
    r[n] = boundary_exceedance_rate(s, constants_for(s), 0.0, 5000, policy);
    o.require(r[n].rate <= r[n].union_bound + 3 * r[n].std_error,
              "n=" + std::to_string(n) + " rate " + g(r[n].rate, 4) + " (SE " + g(r[n].std_error, 2) +
                  ") <= union bound " + g(r[n].union_bound, 4) + " + 3 SE");
  }
  o.require(r[64].rate < r[32].rate, "rate(64) = " + g(r[64].rate, 4) + " < rate(32) = " + g(r[32].rate, 4));
  runtime(o, w, 900);
  return o;
}

// 11 ------------------------------------------------------------------------
std::map<std::string, std::string> read_tree(const fs::path& p) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(p)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[e.path().filename().string()] = s.str();
  }
  return files;
}

Outcome determinism(const fs::path& workdir) {
  Outcome o;
  const std::vector<std::vector<std::string>> commands = {
      {"greens", "--n-list", "4,8"},
      {"verify", "--n-list", "4"},
      {"extremes", "--n", "16", "--replicates", "400", "--seed", "11", "--deltas", "0,1", "--split", "2x2x1"},
      {"sample", "--n", "6", "--replicates", "4", "--seed", "3"},
  };
  for (const auto& base : commands) {
    std::vector<std::map<std::string, std::string>> outputs;
    for (const char* threads : {"1", "3"}) {
      setenv("ZAGFF_THREADS", threads, 1);
      auto args = base;
      const fs::path out = workdir / ("c11_" + base[0] + "_t" + threads);
      args.insert(args.end(), {"--out", out.string(), "--force"});
      std::ostringstream sink;
      const int code = cli::run(args, sink, sink);
      if (code != 0) o.require(false, base[0] + " exited with " + std::to_string(code));
      outputs.push_back(read_tree(out));
    }
    unsetenv("ZAGFF_THREADS");
    o.require(!outputs[0].empty() && outputs[0] == outputs[1],
              base[0] + ": " + std::to_string(outputs[0].size()) + " files byte-identical across runs (1 vs 3 workers)");
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zagff acceptance suite"};
  std::string workdir = (fs::temp_directory_path() / "zagff_acceptance").string();
  std::vector<int> only;
  app.add_option("--workdir", workdir, "scratch directory for CLI outputs");
  app.add_option("--only", only, "run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(workdir);

  Sizes sizes;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"spectral table equals dense pseudo-inverse (d=3, n=3,4,5)", spectral_vs_pseudo_inverse},
      {"golden constant g(0,0) across quadrature, series and Monte Carlo", golden_constant},
      {"Markov identities on Z^d and on the torus", [&] { return lemma_identities(workdir); }},
      {"sampled fields have zero average", zero_average},
      {"sampler covariance at n=6 (M=50000)", sampler_covariance},
      {"convergence of v_n to g(0,0)", convergence},
      {"exit-time bound at n=10", exit_time},
      {"Gumbel limit of rescaled maxima (n=24, M=2000)", [&] { return gumbel(sizes); }},
      {"Poisson structure of exceedances (n=24, delta=0, M=10^4)", [&] { return poisson(sizes); }},
      {"boundary exceedance rate (n=32 vs 64, M=5000)", [&] { return boundary(sizes); }},
      {"CLI determinism across runs and worker counts", [&] { return determinism(workdir); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    if (!o.passed) ++failed;
    std::printf("%s %2d  %s\n", o.passed ? "PASS" : "FAIL", id, criteria[i].first.c_str());
    for (const auto& d : o.details) std::printf("          %s\n", d.c_str());
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
