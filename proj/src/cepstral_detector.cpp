#include "crashdet/cepstral_detector.hpp"

#include <cmath>
#include <string>

#include "crashdet/errors.hpp"

namespace crashdet {

std::size_t CepstralConfig::nominal_length() const {
  return static_cast<std::size_t>(std::llround(window_seconds * sample_rate));
}

std::size_t CepstralConfig::window_length() const { return spectral::next_power_of_two(nominal_length()); }

void CepstralConfig::validate() const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) throw ConfigError("sample rate must be positive");
  if (!(window_seconds > 0.0) || !std::isfinite(window_seconds)) throw ConfigError("window length must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma_cep must be positive");
  if (!(floor > 0.0)) throw ConfigError("spectral floor must be positive");
  if (hop == 0) throw ConfigError("hop must be at least 1 sample");
  spectral::require_fft_length(window_length());
  if (order > window_length()) throw ConfigError("truncation order exceeds window length");
}

namespace {

const CepstralConfig& validated(const CepstralConfig& config) {
  config.validate();
  return config;
}

}  // namespace

CepstralDetector::CepstralDetector(const CepstralConfig& config)
    : config_(validated(config)),
      buffer_(kInertialChannels, config_.window_length()),
      scorer_(kInertialChannels, config_.window_length(), config_.floor, config_.taper, config_.truncation_order()),
      window_(kInertialChannels * config_.window_length()) {}

DetectorVerdict CepstralDetector::step(const ImuSample& sample) {
  if (!buffer_.push(sample)) return {sample.t, false, 0.0, 0.0, DetectorId::cepstral, false};
  if (!evaluated_ || ++since_eval_ >= config_.hop) {
    buffer_.snapshot_into(window_);
    score_ = scorer_.score(window_);
    flag_ = score_ > config_.gamma;
    since_eval_ = 0;
    evaluated_ = true;
  }
  return {sample.t, flag_, score_, 0.0, DetectorId::cepstral, true};
}

void CepstralDetector::reset() {
  buffer_.clear();
  since_eval_ = 0;
  evaluated_ = false;
  score_ = 0.0;
  flag_ = false;
}

std::vector<DetectorVerdict> run_cepstral(std::span<const ImuSample> samples, const CepstralConfig& config) {
  CepstralDetector detector(config);
  std::vector<DetectorVerdict> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(detector.step(s));
  return out;
}

double cepstral_score_reference(const Matrix& window, const CepstralConfig& config) {
  const auto cepstra = spectral::window_cepstra(window, config.floor, config.taper);
  return spectral::martin_distance(cepstra, spectral::zero_reference(window.rows(), window.cols()),
                                   config.order == 0 ? window.cols() : config.order);
}

}  // namespace crashdet
