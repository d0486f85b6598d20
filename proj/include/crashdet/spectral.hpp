#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "crashdet/fft.hpp"
#include "crashdet/imu.hpp"

namespace crashdet::spectral {

/// Bin-wise floor applied before the logarithm, in squared signal units.
inline constexpr double kDefaultFloor = 1e-12;
/// Largest tolerated imaginary residue of an inverse transform that should
/// be real, relative to the largest real coefficient.
inline constexpr double kImagResidueTolerance = 1e-9;

enum class Taper { rectangular, hann };

bool is_power_of_two(std::size_t n) noexcept;
std::size_t next_power_of_two(std::size_t n) noexcept;
/// Throws ConfigError unless m >= 4 and m is a power of two.
void require_fft_length(std::size_t m);

/// Power per DFT bin, all bins non-negative and finite.
struct Spectrum {
  std::vector<double> bins;

  std::size_t size() const noexcept { return bins.size(); }
};

/// Phi[k] = |DFT(w * x)[k]|^2 / sum(w^2). For the rectangular taper this is
/// |DFT(x)[k]|^2 / m, and sum_k Phi[k] = sum_t x[t]^2.
Spectrum periodogram(std::span<const double> series, Taper taper = Taper::rectangular);

/// c = Re(IDFT(log(max(Phi, floor)))), length m.
std::vector<double> power_cepstrum(const Spectrum& spectrum, double floor = kDefaultFloor);

/// p x m cepstral coefficients, row j for channel j, column k for order k.
class CepstraMatrix {
 public:
  CepstraMatrix() = default;
  CepstraMatrix(std::size_t channels, std::size_t length) : coeffs_(channels, length) {}
  explicit CepstraMatrix(Matrix coeffs) : coeffs_(std::move(coeffs)) {}

  std::size_t channels() const noexcept { return coeffs_.rows(); }
  std::size_t length() const noexcept { return coeffs_.cols(); }

  double& operator()(std::size_t j, std::size_t k) noexcept { return coeffs_(j, k); }
  double operator()(std::size_t j, std::size_t k) const noexcept { return coeffs_(j, k); }
  std::span<double> row(std::size_t j) noexcept { return coeffs_.row(j); }
  std::span<const double> row(std::size_t j) const noexcept { return coeffs_.row(j); }

  const Matrix& matrix() const noexcept { return coeffs_; }

 private:
  Matrix coeffs_;
};

/// The reference cepstra: all zeros, the cepstrum of a unit flat spectrum.
CepstraMatrix zero_reference(std::size_t channels, std::size_t length);

/// Row j = power_cepstrum(periodogram(window row j)). Throws DataError if an
/// inverse transform leaves an imaginary residue above tolerance.
CepstraMatrix window_cepstra(const Matrix& window, double floor = kDefaultFloor,
                             Taper taper = Taper::rectangular);

/// Extended Martin distance over multiple channels:
///   d = sqrt( sum_{k<order} k * | sum_j (A[j][k] - B[j][k]) |^2 ).
/// The k weight removes order 0, which makes d blind to uniform gain.
double martin_distance(const CepstraMatrix& a, const CepstraMatrix& b, std::size_t order);
/// Full truncation order (order = m).
double martin_distance(const CepstraMatrix& a, const CepstraMatrix& b);

/// Streaming score kernel: Martin distance of a window's cepstra against the
/// zero reference, computed without materializing per-channel cepstra.
///
/// The inverse transform is linear, so sum_j c_j = IDFT(sum_j log Phi_j):
/// one real FFT per channel and a single even inverse per window. Owns its
/// scratch buffers.
class ZeroReferenceScorer {
 public:
  ZeroReferenceScorer(std::size_t channels, std::size_t length, double floor = kDefaultFloor,
                      Taper taper = Taper::rectangular, std::size_t order = 0);

  /// `window` is p x m row-major, oldest to newest along each row.
  double score(std::span<const double> window);
  double score(const Matrix& window) { return score(window.data()); }

  /// Channel-summed cepstrum from the last call to score().
  std::span<const double> summed_cepstrum() const noexcept { return summed_; }

  std::size_t channels() const noexcept { return channels_; }
  std::size_t length() const noexcept { return length_; }
  std::size_t order() const noexcept { return order_; }

 private:
  std::size_t channels_;
  std::size_t length_;
  double floor_;
  std::size_t order_;
  std::vector<double> taper_;
  double taper_energy_ = 0.0;
  std::vector<double> tapered_;
  std::vector<std::complex<double>> spectrum_;
  std::vector<double> log_sum_;
  std::vector<double> product_;
  std::vector<double> half_cepstrum_;
  std::vector<double> summed_;
};

}  // namespace crashdet::spectral
