#include "crashdet/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "crashdet/errors.hpp"

namespace crashdet::spectral {

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) noexcept {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void require_fft_length(std::size_t m) {
  if (m < 4 || !is_power_of_two(m))
    throw ConfigError("spectral length " + std::to_string(m) + " must be a power of two >= 4");
}

namespace {

std::vector<double> make_taper(std::size_t m, Taper taper) {
  std::vector<double> w(m, 1.0);
  if (taper == Taper::hann) {
    for (std::size_t n = 0; n < m; ++n)
      w[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(m)));
  }
  return w;
}

double energy(const std::vector<double>& w) {
  double e = 0.0;
  for (double v : w) e += v * v;
  return e;
}

// Real part of the normalized inverse DFT; reports the largest imaginary
// magnitude relative to the largest real one.
std::vector<double> real_inverse(std::vector<std::complex<double>>& work, double& residue) {
  const std::size_t m = work.size();
  cached_plan(m).inverse(work);
  std::vector<double> out(m);
  double max_re = 0.0;
  double max_im = 0.0;
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < m; ++k) {
    out[k] = work[k].real() * scale;
    max_re = std::max(max_re, std::abs(out[k]));
    max_im = std::max(max_im, std::abs(work[k].imag() * scale));
  }
  residue = max_im / std::max(max_re, 1.0);
  return out;
}

std::vector<double> log_spectrum_cepstrum(const Spectrum& spectrum, double floor, double& residue) {
  if (!(floor > 0.0)) throw ConfigError("spectral floor must be positive");
  require_fft_length(spectrum.size());
  std::vector<std::complex<double>> work(spectrum.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) work[k] = std::log(std::max(spectrum.bins[k], floor));
  return real_inverse(work, residue);
}

}  // namespace

Spectrum periodogram(std::span<const double> series, Taper taper) {
  const std::size_t m = series.size();
  require_fft_length(m);
  const auto w = make_taper(m, taper);
  std::vector<std::complex<double>> work(m);
  for (std::size_t n = 0; n < m; ++n) work[n] = series[n] * w[n];
  cached_plan(m).forward(work);
  const double norm = 1.0 / energy(w);
  Spectrum out;
  out.bins.resize(m);
  for (std::size_t k = 0; k < m; ++k) out.bins[k] = std::norm(work[k]) * norm;
  return out;
}

std::vector<double> power_cepstrum(const Spectrum& spectrum, double floor) {
  double residue = 0.0;
  return log_spectrum_cepstrum(spectrum, floor, residue);
}

CepstraMatrix zero_reference(std::size_t channels, std::size_t length) { return CepstraMatrix(channels, length); }

CepstraMatrix window_cepstra(const Matrix& window, double floor, Taper taper) {
  CepstraMatrix out(window.rows(), window.cols());
  for (std::size_t j = 0; j < window.rows(); ++j) {
    double residue = 0.0;
    const auto c = log_spectrum_cepstrum(periodogram(window.row(j), taper), floor, residue);
    if (residue > kImagResidueTolerance)
      throw DataError("cepstrum of channel " + std::to_string(j) + " has imaginary residue " +
                      std::to_string(residue));
    std::copy(c.begin(), c.end(), out.row(j).begin());
  }
  return out;
}

double martin_distance(const CepstraMatrix& a, const CepstraMatrix& b, std::size_t order) {
  if (a.channels() != b.channels() || a.length() != b.length())
    throw DimensionError("cepstra dimensions differ: " + std::to_string(a.channels()) + "x" +
                         std::to_string(a.length()) + " vs " + std::to_string(b.channels()) + "x" +
                         std::to_string(b.length()));
  if (order > a.length()) throw DimensionError("truncation order exceeds cepstrum length");
  double total = 0.0;
  for (std::size_t k = 1; k < order; ++k) {
    double mismatch = 0.0;
    for (std::size_t j = 0; j < a.channels(); ++j) mismatch += a(j, k) - b(j, k);
    total += static_cast<double>(k) * mismatch * mismatch;
  }
  return std::sqrt(total);
}

double martin_distance(const CepstraMatrix& a, const CepstraMatrix& b) {
  return martin_distance(a, b, a.length());
}

ZeroReferenceScorer::ZeroReferenceScorer(std::size_t channels, std::size_t length, double floor, Taper taper,
                                         std::size_t order)
    : channels_(channels), length_(length), floor_(floor), order_(order == 0 ? length : order) {
  require_fft_length(length);
  if (channels == 0) throw ConfigError("scorer needs at least one channel");
  if (!(floor > 0.0)) throw ConfigError("spectral floor must be positive");
  if (order_ > length) throw ConfigError("truncation order exceeds window length");
  taper_ = make_taper(length, taper);
  taper_energy_ = energy(taper_);
  const std::size_t half = length / 2 + 1;
  tapered_.resize(length);
  spectrum_.resize(half);
  log_sum_.resize(half);
  product_.resize(half);
  half_cepstrum_.resize(half);
  summed_.resize(length);
}

double ZeroReferenceScorer::score(std::span<const double> window) {
  const std::size_t m = length_;
  const std::size_t half = m / 2;
  if (window.size() != channels_ * m) throw DimensionError("scorer window has wrong size");
  // Looked up per call: plans are cached per thread and scorers may move.
  const FftPlan& plan = cached_plan(m);
  const double norm = 1.0 / taper_energy_;

  // Channel powers are multiplied per bin and logged once.
  std::fill(log_sum_.begin(), log_sum_.end(), 0.0);
  std::fill(product_.begin(), product_.end(), 1.0);
  for (std::size_t j = 0; j < channels_; ++j) {
    const double* x = window.data() + j * m;
    for (std::size_t n = 0; n < m; ++n) tapered_[n] = x[n] * taper_[n];
    plan.real_forward(tapered_, spectrum_);
    for (std::size_t k = 0; k <= half; ++k) {
      const double re = spectrum_[k].real();
      const double im = spectrum_[k].imag();
      double& prod = product_[k];
      prod *= std::max((re * re + im * im) * norm, floor_);
      if (prod < 1e-200 || prod > 1e200) {
        log_sum_[k] += std::log(prod);
        prod = 1.0;
      }
    }
  }
  for (std::size_t k = 0; k <= half; ++k) log_sum_[k] += std::log(product_[k]);

  plan.even_inverse(log_sum_, half_cepstrum_);
  const double scale = 1.0 / static_cast<double>(m);
  double total = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double c = half_cepstrum_[k <= half ? k : m - k] * scale;
    summed_[k] = c;
    if (k < order_) total += static_cast<double>(k) * c * c;
  }
  return std::sqrt(total);
}

}  // namespace crashdet::spectral
