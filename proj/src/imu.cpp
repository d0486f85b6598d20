#include "crashdet/imu.hpp"

#include <cmath>
#include <string>

#include "crashdet/errors.hpp"
#include "crashdet/format.hpp"

namespace crashdet {

void require_finite(const ImuSample& sample) {
  const auto values = sample.inertial();
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!std::isfinite(values[j])) throw NonFiniteSampleError(std::string(kInertialNames[j]), sample.t);
  }
}

double accel_norm(const ImuSample& s) noexcept { return std::sqrt(s.ax * s.ax + s.ay * s.ay + s.az * s.az); }

double gyro_norm_xz(const ImuSample& s) noexcept { return std::sqrt(s.wx * s.wx + s.wz * s.wz); }

std::string_view to_string(EventKind kind) noexcept { return kind == EventKind::crash ? "crash" : "none"; }

EventKind parse_event_kind(std::string_view name) {
  if (name == "crash") return EventKind::crash;
  if (name == "none") return EventKind::none;
  throw ConfigError("unknown event kind '" + std::string(name) + "'");
}

void validate(const TraceEvent& event) {
  if (!std::isfinite(event.start_t) || !std::isfinite(event.duration) || event.duration < 0.0)
    throw ConfigError("event has invalid start/duration");
  if (event.kind == EventKind::crash && !(event.duration > 0.0))
    throw ConfigError("crash event at t=" + format_number(event.start_t) + " must have positive duration");
}

}  // namespace crashdet
