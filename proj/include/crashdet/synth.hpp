#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crashdet/imu.hpp"
#include "crashdet/trace.hpp"

namespace crashdet::synth {

enum class RideStyle { cautious, aggressive };
enum class CrashKind { lowside, highside, sliding };

std::string_view to_string(RideStyle style) noexcept;
RideStyle parse_ride_style(std::string_view name);
std::string_view to_string(CrashKind kind) noexcept;
CrashKind parse_crash_kind(std::string_view name);

/// Stddevs (ax, ay, az, wx, wz) of the cautious style; aggressive doubles them.
inline constexpr std::array<double, kInertialChannels> kCautiousStddevs{0.8, 0.8, 0.6, 0.25, 0.12};
/// Shortest ride accepted by generate_ride is twice this (the 10.24 s window).
inline constexpr double kDefaultWindowSeconds = 10.24;

/// Nominal riding: every inertial channel is 4th-order Butterworth low-pass
/// noise scaled to its stddev plus a white sensor floor; a_z carries gravity.
struct RideProfile {
  RideStyle style = RideStyle::cautious;
  double sample_rate = kDefaultSampleRate;
  double band_limit = 10.0;    // Hz
  double filter_ratio = 0.6;   // filter cutoff = filter_ratio * band_limit
  std::array<double, kInertialChannels> channel_stddevs = kCautiousStddevs;
  double sensor_noise = 0.15;  // white floor, relative to each channel stddev
  double gravity_bias = kGravity;
  bool speed = true;
  double speed_mean = 20.0;    // m/s
  double speed_stddev = 2.0;   // m/s
  double speed_tau = 20.0;     // s, correlation time of the speed wander
  std::uint64_t seed = 1;

  static RideProfile for_style(RideStyle style, std::uint64_t seed);
  double filter_cutoff() const noexcept { return filter_ratio * band_limit; }
  void validate() const;
};

/// One crash laid over a ride. `t0` and `duration` delimit the labelled event.
///
/// A crash is built from independent components; with all of them disabled
/// the injection leaves the samples untouched.
///  - broadband: white noise at burst_gain x channel stddev on all channels
///  - structural: 4th-order Butterworth noise at `crash_band` Hz,
///    structural_gain x channel stddev (frame and ground-contact vibration)
///  - kind_motion: lowside sustained roll, highside alternating roll,
///    sliding sustained longitudinal deceleration
///  - freefall: `freefall_seconds` of near-zero specific force with a
///    sustained roll rate, then a >= 3 g impact spike
struct CrashProfile {
  CrashKind kind = CrashKind::lowside;
  double t0 = 0.0;
  double duration = 8.0;
  double burst_gain = 1.2;
  bool broadband = true;
  bool structural = true;
  double structural_gain = 20.0;
  double crash_band = 20.0;  // Hz
  bool kind_motion = true;
  bool freefall = true;
  double freefall_seconds = 0.6;
  double min_duration = 6.0;
  double max_duration = 14.0;
  std::uint64_t seed = 1;

  /// Default component set for a kind: sliding crashes have no free fall.
  static CrashProfile for_kind(CrashKind kind, double t0, double duration, std::uint64_t seed);
  void validate() const;
};

/// Throws ConfigError on an invalid profile or when duration < 2 * window_seconds.
TraceFile generate_ride(const RideProfile& profile, double duration, double window_seconds = kDefaultWindowSeconds);

/// Adds the crash to a copy of `trace` and appends its crash label.
/// `channel_stddevs` sets the scale of the added components, normally the
/// stddevs of the ride the trace was generated from.
TraceFile inject_crash(const TraceFile& trace, const CrashProfile& crash,
                       const std::array<double, kInertialChannels>& channel_stddevs);

struct SuiteEntry {
  std::string name;
  RideProfile ride;
  double duration = 0.0;
  std::optional<CrashProfile> crash;
};

/// Seven crash traces (lowside, highside and sliding, durations in [6, 14] s,
/// alternating ride styles) plus one long nominal trace per style.
std::vector<SuiteEntry> standard_suite(std::uint64_t seed, double nominal_seconds = 1800.0,
                                       double crash_trace_seconds = 120.0);

TraceFile build(const SuiteEntry& entry);

/// Independent child seed for stream `index` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace crashdet::synth
