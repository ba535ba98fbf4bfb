#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace enstro::detail {

struct FftPlans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

// FFTW planning is not thread-safe; execution through the new-array API is.
// Plans are created once per size and live for the whole process.
inline const FftPlans& plans_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, FftPlans> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  double* real = fftw_alloc_real(n);
  fftw_complex* cplx = fftw_alloc_complex(n / 2 + 1);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  FftPlans plans;
  plans.r2c = fftw_plan_dft_r2c_1d(static_cast<int>(n), real, cplx, flags);
  plans.c2r = fftw_plan_dft_c2r_1d(static_cast<int>(n), cplx, real, flags);
  fftw_free(cplx);
  fftw_free(real);
  return cache.emplace(n, plans).first->second;
}

/// Unnormalized real-to-half-complex transform pair of fixed length.
/// Owns scratch storage, so one instance must not be shared across threads.
class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n), plans_(&plans_for(n)), scratch_(n / 2 + 1) {}

  std::size_t size() const noexcept { return n_; }
  std::size_t half() const noexcept { return n_ / 2 + 1; }

  /// out[k] = sum_j in[j] exp(-2 pi i k j / n), k = 0..n/2.
  void forward(const double* in, std::complex<double>* out) const {
    fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
  }

  /// out[j] = sum_k in[k] exp(2 pi i k j / n) over the Hermitian extension.
  /// The input is left untouched; c2r clobbers a private copy.
  void backward(const std::complex<double>* in, double* out) {
    std::copy(in, in + half(), scratch_.begin());
    fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(scratch_.data()), out);
  }

 private:
  std::size_t n_;
  const FftPlans* plans_;
  std::vector<std::complex<double>> scratch_;
};

}  // namespace enstro::detail
