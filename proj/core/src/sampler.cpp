#include "zagff/sampler.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "fft.hpp"
#include "zagff/error.hpp"
#include "zagff/parallel.hpp"

namespace zagff {

SpectralSampler::SpectralSampler(const FieldConfig& cfg)
    : cfg_(cfg), fft_(std::make_unique<detail::InverseRealFft>(cfg)) {
  const auto lambda = laplacian_eigenvalues(cfg);
  const std::size_t total = lambda.size();
  scale_.resize(total);
  mode_.resize(total);
  partner_.resize(total);
  const int n = cfg.n();
  std::vector<Coord> k(static_cast<std::size_t>(cfg.d()));
  for (std::size_t idx = 0; idx < total; ++idx) {
    site_coords(static_cast<std::int64_t>(idx), cfg, k);
    std::int64_t neg = 0;
    for (Coord kj : k) neg = neg * n + (n - kj) % n;
    partner_[idx] = neg;
    if (idx != 0) site_variance_ += 1.0 / lambda[idx];
    if (idx == 0) {
      mode_[idx] = Mode::kZero;
      scale_[idx] = 0.0;
    } else if (neg == static_cast<std::int64_t>(idx)) {
      mode_[idx] = Mode::kSelf;
      scale_[idx] = 1.0 / std::sqrt(lambda[idx]);
    } else if (static_cast<std::int64_t>(idx) < neg) {
      mode_[idx] = Mode::kRepresentative;
      scale_[idx] = 1.0 / std::sqrt(2.0 * lambda[idx]);
    } else {
      mode_[idx] = Mode::kConjugate;
      scale_[idx] = 0.0;
    }
  }
  site_variance_ /= static_cast<double>(total);
}

SpectralSampler::~SpectralSampler() = default;

TorusField SpectralSampler::sample(std::uint64_t seed) const {
  const std::size_t total = mode_.size();
  const int n = cfg_.n();
  const int hl = fft_->half_last();
  StreamRng rng(seed);

  // Full spectrum first: a conjugate's representative always precedes it.
  std::vector<double> re(total, 0.0), im(total, 0.0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    switch (mode_[idx]) {
      case Mode::kZero:
        break;
      case Mode::kSelf:
        re[idx] = scale_[idx] * rng.normal();
        break;
      case Mode::kRepresentative:
        re[idx] = scale_[idx] * rng.normal();
        im[idx] = scale_[idx] * rng.normal();
        break;
      case Mode::kConjugate: {
        const auto p = static_cast<std::size_t>(partner_[idx]);
        re[idx] = re[p];
        im[idx] = -im[p];
        break;
      }
    }
  }

  auto half = fft_->make_half();
  auto out = fft_->make_real();
  const std::size_t rows = total / static_cast<std::size_t>(n);
  for (std::size_t r = 0; r < rows; ++r) {
    for (int kd = 0; kd < hl; ++kd) {
      const std::size_t full = r * static_cast<std::size_t>(n) + static_cast<std::size_t>(kd);
      const std::size_t h = r * static_cast<std::size_t>(hl) + static_cast<std::size_t>(kd);
      half[h][0] = re[full];
      half[h][1] = im[full];
    }
  }
  fft_->execute(half.get(), out.get());

  TorusField field{cfg_, std::vector<double>(total), seed};
  const double norm = 1.0 / std::sqrt(static_cast<double>(total));
  for (std::size_t i = 0; i < total; ++i) field.values[i] = out[i] * norm;
  return field;
}

TorusField sample_field(const FieldConfig& cfg, std::uint64_t seed) { return SpectralSampler(cfg).sample(seed); }

void for_each_field(const SpectralSampler& sampler, const SeedPolicy& policy, std::int64_t count,
                    const std::function<void(std::int64_t, const TorusField&)>& visit) {
  if (count < 1) throw Error(ErrorKind::kInvalidArgument, "batch count must be >= 1");
  parallel_for(count, [&](std::int64_t i) {
    const TorusField field = sampler.sample(policy.derive(static_cast<std::uint64_t>(i)));
    visit(i, field);
  });
}

std::vector<TorusField> sample_batch(const FieldConfig& cfg, const SeedPolicy& policy, std::int64_t count) {
  const SpectralSampler sampler(cfg);
  std::vector<TorusField> out(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)), TorusField{cfg, {}, 0});
  for_each_field(sampler, policy, count, [&](std::int64_t i, const TorusField& f) { out[static_cast<std::size_t>(i)] = f; });
  return out;
}

DenseSampleOracle::DenseSampleOracle(const GreenTable& table) : cfg_(table.config()) {
  const std::int64_t sites = cfg_.sites();
  if (sites > kMaxSites) {
    throw Error(ErrorKind::kResourceExhausted,
                "dense sampler oracle limited to N <= 512 (got " + std::to_string(sites) + ")");
  }
  const auto m = static_cast<Eigen::Index>(sites);
  Eigen::MatrixXd g(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) g(i, j) = table.covariance_index(i, j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
  // G is PSD with a one-dimensional kernel (the constants); eigenvalues at
  // rounding level are that kernel and are dropped exactly.
  const double cutoff = 1e-12 * eig.eigenvalues().cwiseAbs().maxCoeff();
  const Eigen::VectorXd root =
      eig.eigenvalues().unaryExpr([cutoff](double lam) { return lam > cutoff ? std::sqrt(lam) : 0.0; });
  const Eigen::MatrixXd f = eig.eigenvectors() * root.asDiagonal();
  factor_.resize(static_cast<std::size_t>(m * m));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) factor_[static_cast<std::size_t>(i * m + j)] = f(i, j);
  }
}

TorusField DenseSampleOracle::sample(std::uint64_t seed) const {
  const auto m = static_cast<std::size_t>(cfg_.sites());
  StreamRng rng(seed);
  std::vector<double> z(m);
  for (auto& v : z) v = rng.normal();
  TorusField field{cfg_, std::vector<double>(m, 0.0), seed};
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += factor_[i * m + j] * z[j];
    field.values[i] = s;
  }
  return field;
}

TorusField dense_sample_oracle(const FieldConfig& cfg, std::uint64_t seed) {
  return DenseSampleOracle(zero_average_green(cfg)).sample(seed);
}

}  // namespace zagff
