#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace crashdet {

inline constexpr double kGravity = 9.8056;  // m/s^2
inline constexpr double kDefaultSampleRate = 100.0;  // Hz
inline constexpr std::size_t kInertialChannels = 5;
inline constexpr std::array<std::string_view, kInertialChannels> kInertialNames{
    "ax", "ay", "az", "wx", "wz"};

/// One reading of the 5-DOF IMU: triaxial acceleration (m/s^2), roll and
/// yaw rate (rad/s). Speed (m/s) is carried for monitoring and for the
/// Mahalanobis feature sets only.
struct ImuSample {
  double t = 0.0;
  double ax = 0.0;
  double ay = 0.0;
  double az = 0.0;
  double wx = 0.0;
  double wz = 0.0;
  std::optional<double> speed;

  std::array<double, kInertialChannels> inertial() const noexcept { return {ax, ay, az, wx, wz}; }

  bool operator==(const ImuSample&) const = default;
};

/// Throws NonFiniteSampleError naming the first offending inertial channel.
void require_finite(const ImuSample& sample);

double accel_norm(const ImuSample& s) noexcept;
/// Angular-rate norm over roll and yaw only; pitch rate is not measured.
double gyro_norm_xz(const ImuSample& s) noexcept;

/// Dense row-major matrix used for windows (p x m) and training sets (n x p).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class EventKind { crash, none };

std::string_view to_string(EventKind kind) noexcept;
/// Throws ConfigError for unknown names.
EventKind parse_event_kind(std::string_view name);

/// A labelled interval of a trace. Crash events must have positive duration.
struct TraceEvent {
  EventKind kind = EventKind::crash;
  double start_t = 0.0;
  double duration = 0.0;

  double end_t() const noexcept { return start_t + duration; }
  bool operator==(const TraceEvent&) const = default;
};

void validate(const TraceEvent& event);

}  // namespace crashdet
