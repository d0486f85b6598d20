#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace crashdet::spectral {

/// Power-of-two FFTs backed by FFTW. Plans are built once per thread and
/// size (FFTW planning is serialized internally); execution is reentrant.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const noexcept { return n_; }

  /// In place, X[k] = sum_n x[n] exp(-2 pi i k n / N). Unnormalized.
  void forward(std::span<std::complex<double>> data) const;
  /// In place, x[n] = sum_k X[k] exp(+2 pi i k n / N). Unnormalized.
  void inverse(std::span<std::complex<double>> data) const;

  /// Half spectrum of a real sequence: out[k] = X[k] for k <= N/2.
  void real_forward(std::span<const double> in, std::span<std::complex<double>> out) const;
  /// Inverse DFT of a real even spectrum given by its first N/2 + 1 bins:
  /// out[n] = sum_k X[k] exp(+2 pi i k n / N) for n <= N/2. Unnormalized.
  void even_inverse(std::span<const double> in, std::span<double> out) const;

 private:
  struct Plans;
  std::size_t n_;
  std::unique_ptr<Plans> plans_;
};

/// Per-thread cache so callers do not rebuild plans.
const FftPlan& cached_plan(std::size_t n);

}  // namespace crashdet::spectral
