#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "zagff/lattice.hpp"

namespace zagff::detail {

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

/// Multidimensional complex-to-real inverse transform over the torus
/// (unnormalized, e^{+2 pi i k.x / n}). The half-spectrum layout is
/// n x ... x n x (n/2 + 1). Planning is serialized; execute() is safe to call
/// concurrently on distinct buffers.
class InverseRealFft {
 public:
  explicit InverseRealFft(const FieldConfig& cfg);
  ~InverseRealFft();
  InverseRealFft(const InverseRealFft&) = delete;
  InverseRealFft& operator=(const InverseRealFft&) = delete;

  std::size_t half_size() const noexcept { return half_size_; }
  std::size_t real_size() const noexcept { return real_size_; }
  int half_last() const noexcept { return half_last_; }

  FftwBuffer<fftw_complex> make_half() const;
  FftwBuffer<double> make_real() const;

  /// Destroys `half`.
  void execute(fftw_complex* half, double* out) const;

 private:
  fftw_plan plan_ = nullptr;
  std::size_t half_size_;
  std::size_t real_size_;
  int half_last_;
};

}  // namespace zagff::detail
