#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crashdet/imu.hpp"
#include "crashdet/verdict.hpp"

namespace crashdet {

/// Midpoint between the largest nominal score and the smallest crash peak,
/// rounded to 12 significant digits. Throws CalibrationError when
/// normal_max >= crash_min, ConfigError on negative or non-finite input.
double calibrate_gamma(double normal_max, double crash_min);

/// Score envelope of one trace: the maximum over nominal samples and the
/// peak within each crash event's detection window.
struct ScoreEnvelope {
  std::string trace;
  std::optional<double> nominal_max;  // empty when no ready nominal sample exists
  std::vector<double> crash_peaks;    // one per crash event, in label order
};

/// Nominal samples are ready verdicts outside every [start - pad, end + pad]
/// crash window; a crash peak is the largest ready score in [start, end + pad].
ScoreEnvelope score_envelope(std::string trace, std::span<const DetectorVerdict> verdicts,
                             std::span<const TraceEvent> labels, double pad_seconds);

struct CalibrationResult {
  double normal_max = 0.0;
  double crash_min = 0.0;
  std::optional<double> gamma;  // empty when the envelopes overlap

  bool feasible() const noexcept { return gamma.has_value(); }
};

/// Needs at least one envelope with a nominal max and one with a crash peak.
CalibrationResult calibrate(std::span<const ScoreEnvelope> envelopes);

}  // namespace crashdet
