#include "crashdet/threshold_detector.hpp"

#include <cmath>

#include "crashdet/errors.hpp"

namespace crashdet {

void ThresholdConfig::validate() const {
  if (!(gamma_a > 0.0) || !std::isfinite(gamma_a)) throw ConfigError("gamma_a must be positive");
  if (!(gamma_omega > 0.0) || !std::isfinite(gamma_omega)) throw ConfigError("gamma_omega must be positive");
}

DetectorVerdict threshold_step(const ImuSample& sample, const ThresholdConfig& config) {
  const double a = accel_norm(sample);
  const double w = gyro_norm_xz(sample);
  return {sample.t, a < config.gamma_a && w > config.gamma_omega, a, w, DetectorId::threshold, true};
}

std::vector<DetectorVerdict> run_threshold(std::span<const ImuSample> samples, const ThresholdConfig& config) {
  config.validate();
  std::vector<DetectorVerdict> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    require_finite(s);
    out.push_back(threshold_step(s, config));
  }
  return out;
}

}  // namespace crashdet
