#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crashdet/imu.hpp"
#include "crashdet/kv.hpp"
#include "crashdet/verdict.hpp"

namespace crashdet {

struct EvalConfig {
  double sample_rate = kDefaultSampleRate;
  /// Detection windows run to end + pad; the no-false-positive zone is
  /// [start - pad, end + pad]. Defaults to the effective cepstral window.
  double pad_seconds = 10.24;

  void validate() const;
};

struct EventOutcome {
  TraceEvent event;
  bool detected = false;
  std::optional<double> latency;  // first ON time in [start, end + pad] minus start

  bool operator==(const EventOutcome&) const = default;
};

/// Counts kept raw so reports of disjoint traces merge by addition.
struct EvalReport {
  std::string detector;
  double sample_rate = kDefaultSampleRate;
  double pad_seconds = 10.24;
  std::size_t traces = 0;
  std::size_t samples = 0;
  std::vector<EventOutcome> events;
  /// OFF->ON transitions (the stream starts OFF) at samples outside every
  /// padded crash window.
  std::size_t false_positive_episodes = 0;
  /// ON runs overlapping the detection window of a detected event.
  std::size_t on_runs = 0;
  std::size_t on_run_samples = 0;

  double trace_hours() const noexcept { return static_cast<double>(samples) / sample_rate / 3600.0; }
  std::size_t detected_count() const noexcept;
  /// Mean ON-run length in seconds during detected events; empty without runs.
  std::optional<double> flag_consistency() const noexcept;

  bool operator==(const EvalReport&) const = default;
};

/// Labels of kind `none` are ignored. Throws DataError when crash labels
/// overlap or start outside the verdict time span.
EvalReport evaluate(std::span<const DetectorVerdict> verdicts, std::span<const TraceEvent> labels,
                    const EvalConfig& config, std::string detector = {});

/// Combines reports of disjoint traces. Throws ConfigError when their
/// detector, sample rate or pad differ.
EvalReport merge(const EvalReport& a, const EvalReport& b);

/// Key-value form, `format=crashdet-report/1`.
KvDocument to_kv(const EvalReport& report);
EvalReport report_from_kv(const KvDocument& doc);

}  // namespace crashdet
