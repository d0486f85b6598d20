#include "crashdet/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

#include "crashdet/errors.hpp"
#include "crashdet/spectral.hpp"

namespace crashdet::spectral {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

struct FftPlan::Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  fftw_plan real_forward = nullptr;
  fftw_plan even_inverse = nullptr;
};

FftPlan::FftPlan(std::size_t n) : n_(n), plans_(std::make_unique<Plans>()) {
  if (!is_power_of_two(n) || n < 2) throw ConfigError("FFT length " + std::to_string(n) + " is not a power of two");
  const int size = static_cast<int>(n);
  std::vector<std::complex<double>> c(n);
  std::vector<double> r(n);
  std::vector<std::complex<double>> half(n / 2 + 1);
  std::vector<double> even(n / 2 + 1);
  std::vector<double> even_out(n / 2 + 1);

  std::lock_guard lock(planner_mutex());
  plans_->forward = fftw_plan_dft_1d(size, as_fftw(c.data()), as_fftw(c.data()), FFTW_FORWARD, kFlags);
  plans_->inverse = fftw_plan_dft_1d(size, as_fftw(c.data()), as_fftw(c.data()), FFTW_BACKWARD, kFlags);
  plans_->real_forward = fftw_plan_dft_r2c_1d(size, r.data(), as_fftw(half.data()), kFlags);
  // REDFT00 of length N/2 + 1 is the DFT of the even extension to length N.
  plans_->even_inverse =
      fftw_plan_r2r_1d(size / 2 + 1, even.data(), even_out.data(), FFTW_REDFT00, kFlags);
  if (!plans_->forward || !plans_->inverse || !plans_->real_forward || !plans_->even_inverse)
    throw ConfigError("FFTW could not plan a transform of length " + std::to_string(n));
}

FftPlan::~FftPlan() {
  if (!plans_) return;
  std::lock_guard lock(planner_mutex());
  for (auto p : {plans_->forward, plans_->inverse, plans_->real_forward, plans_->even_inverse})
    if (p) fftw_destroy_plan(p);
}

void FftPlan::forward(std::span<std::complex<double>> data) const {
  if (data.size() != n_) throw DimensionError("FFT input length does not match plan");
  fftw_execute_dft(plans_->forward, as_fftw(data.data()), as_fftw(data.data()));
}

void FftPlan::inverse(std::span<std::complex<double>> data) const {
  if (data.size() != n_) throw DimensionError("FFT input length does not match plan");
  fftw_execute_dft(plans_->inverse, as_fftw(data.data()), as_fftw(data.data()));
}

void FftPlan::real_forward(std::span<const double> in, std::span<std::complex<double>> out) const {
  if (in.size() != n_ || out.size() != n_ / 2 + 1) throw DimensionError("real FFT buffers do not match plan");
  // out-of-place r2c leaves its input untouched
  fftw_execute_dft_r2c(plans_->real_forward, const_cast<double*>(in.data()), as_fftw(out.data()));
}

void FftPlan::even_inverse(std::span<const double> in, std::span<double> out) const {
  if (in.size() != n_ / 2 + 1 || out.size() != n_ / 2 + 1)
    throw DimensionError("even inverse buffers do not match plan");
  fftw_execute_r2r(plans_->even_inverse, const_cast<double*>(in.data()), out.data());
}

const FftPlan& cached_plan(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<FftPlan>> plans;
  auto& slot = plans[n];
  if (!slot) slot = std::make_unique<FftPlan>(n);
  return *slot;
}

}  // namespace crashdet::spectral
