#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crashdet/imu.hpp"
#include "crashdet/spectral.hpp"
#include "crashdet/verdict.hpp"
#include "crashdet/window_buffer.hpp"

namespace crashdet {

/// One-class cepstral detector settings.
///
/// The nominal window is `window_seconds * sample_rate` samples; the buffer
/// holds the closest power of two at or above it (10 s at 100 Hz gives 1024
/// samples, 10.24 s). `order` is the Martin truncation order, 0 for the full
/// window.
struct CepstralConfig {
  double window_seconds = 10.0;
  double sample_rate = kDefaultSampleRate;
  double gamma = 0.029;
  double floor = spectral::kDefaultFloor;
  std::size_t hop = 1;
  spectral::Taper taper = spectral::Taper::rectangular;
  std::size_t order = 0;

  std::size_t nominal_length() const;
  std::size_t window_length() const;
  double effective_window_seconds() const { return static_cast<double>(window_length()) / sample_rate; }
  std::size_t truncation_order() const { return order == 0 ? window_length() : order; }

  void validate() const;
};

/// Streams samples through a p x m window and scores each full window by its
/// Martin distance to the zero reference cepstra.
///
/// Warm-up: until the buffer first fills, verdicts are not ready (flag false,
/// score 0). Afterwards the score is recomputed on the first full window and
/// then every `hop` samples; in between the last score and flag are held.
class CepstralDetector {
 public:
  explicit CepstralDetector(const CepstralConfig& config);

  DetectorVerdict step(const ImuSample& sample);
  void reset();

  const CepstralConfig& config() const noexcept { return config_; }
  const WindowBuffer& buffer() const noexcept { return buffer_; }

 private:
  CepstralConfig config_;
  WindowBuffer buffer_;
  spectral::ZeroReferenceScorer scorer_;
  std::vector<double> window_;
  std::size_t since_eval_ = 0;
  bool evaluated_ = false;
  double score_ = 0.0;
  bool flag_ = false;
};

std::vector<DetectorVerdict> run_cepstral(std::span<const ImuSample> samples, const CepstralConfig& config);

/// Reference-path score of a full p x m window: window_cepstra then
/// martin_distance against zero_reference. Slow; used to cross-check the
/// streaming kernel.
double cepstral_score_reference(const Matrix& window, const CepstralConfig& config);

}  // namespace crashdet
