#include "crashdet/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "crashdet/errors.hpp"

namespace crashdet {

double calibrate_gamma(double normal_max, double crash_min) {
  if (!std::isfinite(normal_max) || !std::isfinite(crash_min) || normal_max < 0.0)
    throw ConfigError("calibration envelopes must be finite and non-negative");
  if (normal_max >= crash_min) throw CalibrationError(normal_max, crash_min);
  // Rounded so decimal envelopes give the decimal midpoint (0.027, 0.031 -> 0.029).
  const double mid = 0.5 * (normal_max + crash_min);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", mid);
  const double rounded = std::strtod(buf, nullptr);
  return rounded > normal_max && rounded < crash_min ? rounded : mid;
}

ScoreEnvelope score_envelope(std::string trace, std::span<const DetectorVerdict> verdicts,
                             std::span<const TraceEvent> labels, double pad_seconds) {
  ScoreEnvelope env{std::move(trace), std::nullopt, {}};
  std::vector<TraceEvent> crashes;
  for (const auto& e : labels)
    if (e.kind == EventKind::crash) crashes.push_back(e);
  env.crash_peaks.assign(crashes.size(), 0.0);

  for (const auto& v : verdicts) {
    if (!v.ready) continue;
    bool nominal = true;
    for (std::size_t i = 0; i < crashes.size(); ++i) {
      const auto& e = crashes[i];
      if (v.t >= e.start_t - pad_seconds && v.t <= e.end_t() + pad_seconds) nominal = false;
      if (v.t >= e.start_t && v.t <= e.end_t() + pad_seconds) env.crash_peaks[i] = std::max(env.crash_peaks[i], v.score);
    }
    if (nominal) env.nominal_max = std::max(env.nominal_max.value_or(v.score), v.score);
  }
  return env;
}

CalibrationResult calibrate(std::span<const ScoreEnvelope> envelopes) {
  if (envelopes.empty()) throw ConfigError("calibration needs at least one trace");
  std::optional<double> normal_max;
  std::optional<double> crash_min;
  for (const auto& env : envelopes) {
    if (env.nominal_max) normal_max = std::max(normal_max.value_or(*env.nominal_max), *env.nominal_max);
    for (double peak : env.crash_peaks) crash_min = std::min(crash_min.value_or(peak), peak);
  }
  if (!crash_min) throw ConfigError("calibration needs at least one crash-labelled trace");
  if (!normal_max) throw ConfigError("calibration needs nominal data");

  CalibrationResult result{*normal_max, *crash_min, std::nullopt};
  if (*normal_max < *crash_min) result.gamma = calibrate_gamma(*normal_max, *crash_min);
  return result;
}

}  // namespace crashdet
