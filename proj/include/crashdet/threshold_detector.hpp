#pragma once

#include <span>
#include <vector>

#include "crashdet/imu.hpp"
#include "crashdet/verdict.hpp"

namespace crashdet {

/// Static-threshold fall detector: fires when the acceleration norm drops
/// below gamma_a while the roll/yaw rate norm exceeds gamma_omega.
struct ThresholdConfig {
  double gamma_a = 7.86;      // m/s^2, recalibrated for the 5-DOF setup
  double gamma_omega = 1.77;  // rad/s

  /// Free-fall tuning with the full gyro triad: 0.5 g and 2 rad/s.
  static ThresholdConfig original() noexcept { return {0.5 * kGravity, 2.0}; }
  void validate() const;
};

/// Memoryless: the verdict depends on `sample` alone. Both comparisons are strict.
DetectorVerdict threshold_step(const ImuSample& sample, const ThresholdConfig& config);

std::vector<DetectorVerdict> run_threshold(std::span<const ImuSample> samples, const ThresholdConfig& config);

}  // namespace crashdet
