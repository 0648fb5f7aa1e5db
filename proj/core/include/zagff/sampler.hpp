#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "zagff/greens.hpp"
#include "zagff/lattice.hpp"
#include "zagff/rng.hpp"

namespace zagff {

/// One realization of the zero-average Gaussian free field, values in
/// row-major lexicographic site order.
struct TorusField {
  FieldConfig cfg;
  std::vector<double> values;
  std::uint64_t seed = 0;
};

namespace detail {
class InverseRealFft;
}

/// Exact O(N log N) sampler for the centred Gaussian field with covariance
/// G_T. Frequencies are visited in lexicographic order: k = 0 is skipped, a
/// self-conjugate mode (2k = 0 mod n) draws one real N(0, 1/lambda_k), and
/// the lexicographically smaller of each pair {k, -k} draws Re and Im as
/// N(0, 1/(2 lambda_k)); its partner is the complex conjugate. One inverse
/// FFT scaled by N^{-1/2} produces the field.
///
/// The sampler is immutable after construction; sample() may be called
/// concurrently.
class SpectralSampler {
 public:
  explicit SpectralSampler(const FieldConfig& cfg);
  ~SpectralSampler();
  SpectralSampler(const SpectralSampler&) = delete;
  SpectralSampler& operator=(const SpectralSampler&) = delete;

  const FieldConfig& config() const noexcept { return cfg_; }
  /// Marginal variance G_T(0, 0) = (1/N) sum_{k != 0} 1/lambda_k.
  double site_variance() const noexcept { return site_variance_; }
  TorusField sample(std::uint64_t seed) const;

 private:
  enum class Mode : std::uint8_t { kZero, kSelf, kRepresentative, kConjugate };

  FieldConfig cfg_;
  double site_variance_ = 0.0;
  std::vector<double> scale_;                 // 1/sqrt(lambda_k), or 1/sqrt(2 lambda_k) for pairs
  std::vector<Mode> mode_;
  std::vector<std::int64_t> partner_;         // index of -k
  std::unique_ptr<detail::InverseRealFft> fft_;
};

TorusField sample_field(const FieldConfig& cfg, std::uint64_t seed);

/// Generates replicates 0..count-1, replicate i with seed policy.derive(i),
/// and hands each to visit(i, field). Calls may arrive concurrently and in
/// any order; every indexed field is independent of scheduling.
void for_each_field(const SpectralSampler& sampler, const SeedPolicy& policy, std::int64_t count,
                    const std::function<void(std::int64_t, const TorusField&)>& visit);

/// Materialized batch, index order.
std::vector<TorusField> sample_batch(const FieldConfig& cfg, const SeedPolicy& policy, std::int64_t count);

/// Test oracle: samples through a dense symmetric square root of the exact
/// covariance matrix. Limited to N <= 512.
class DenseSampleOracle {
 public:
  static constexpr std::int64_t kMaxSites = 512;

  explicit DenseSampleOracle(const GreenTable& table);

  const FieldConfig& config() const noexcept { return cfg_; }
  /// Row-major N x N factor F with F F^T = G.
  const std::vector<double>& factor() const noexcept { return factor_; }
  TorusField sample(std::uint64_t seed) const;

 private:
  FieldConfig cfg_;
  std::vector<double> factor_;
};

TorusField dense_sample_oracle(const FieldConfig& cfg, std::uint64_t seed);

// Field export. Binary layout (all little-endian): 8-byte magic "ZAGFFLD1",
// uint32 d, uint32 n, uint64 seed, then N float64 values in site order.
void write_field_binary(const TorusField& field, std::ostream& out);
TorusField read_field_binary(std::istream& in);
/// CSV `x_1,...,x_d,value`, 17 significant digits.
void write_field_csv(const TorusField& field, std::ostream& out);
/// The CSV carries no seed; the returned field has seed 0.
TorusField read_field_csv(std::istream& in);

}  // namespace zagff
