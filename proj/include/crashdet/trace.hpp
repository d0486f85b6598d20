#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crashdet/imu.hpp"

namespace crashdet {

/// Allowed deviation of each timestamp step from the nominal period 1/fs.
inline constexpr double kJitterTolerance = 0.01;

struct TraceHeader {
  double sample_rate = kDefaultSampleRate;
  bool has_speed = false;
  /// Free-form provenance (generator, seed, filter, rng), written in order.
  std::vector<std::pair<std::string, std::string>> metadata;

  bool operator==(const TraceHeader&) const = default;
};

struct TraceFile {
  TraceHeader header;
  std::vector<ImuSample> rows;
  std::vector<TraceEvent> labels;

  double duration() const noexcept;
  bool operator==(const TraceFile&) const = default;
};

/// Checks finiteness, speed presence against the header, and that every
/// timestamp step is 1/fs within +-1%. Throws ParseError with 1-based row
/// numbers counted as file lines (header is line 1).
void validate_trace(const TraceFile& trace);

/// On-disk format: one header line
///   t[s],ax[m/s^2],ay[m/s^2],az[m/s^2],wx[rad/s],wz[rad/s][,speed[m/s]];fs=100[;key=value...]
/// followed by one comma-separated row per sample, numbers in "%.9g".
void write_trace(const TraceFile& trace, std::ostream& out);
TraceFile read_trace(std::istream& in);

/// Labels sidecar: "# kind,start_t,duration" then one event per line.
void write_events(std::span<const TraceEvent> events, std::ostream& out);
std::vector<TraceEvent> read_events(std::istream& in);

/// `run.csv` -> `run.events`
std::filesystem::path events_path_for(const std::filesystem::path& trace_path);

/// Parses the trace and, when present, its `.events` sidecar.
TraceFile parse_trace(const std::filesystem::path& path);
/// Writes the trace and always writes its sidecar (header-only when unlabelled).
void write_trace(const TraceFile& trace, const std::filesystem::path& path);

std::vector<TraceEvent> parse_events(const std::filesystem::path& path);

/// Applies the 9-significant-digit quantization of the text format to every
/// numeric field; parse(write(x)) == quantized(x).
TraceFile quantized(const TraceFile& trace);

}  // namespace crashdet
