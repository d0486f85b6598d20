#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crashdet/imu.hpp"

namespace crashdet {

/// Fixed-capacity sliding window over p channels. Holds the most recent
/// `capacity` samples per channel; the oldest is evicted once full.
///
/// Single writer. Instances own all their state and may be moved between
/// threads.
class WindowBuffer {
 public:
  WindowBuffer(std::size_t channels, std::size_t capacity);

  /// Appends one multi-channel sample. Returns true iff the window is full
  /// after the push. Rejects non-finite values before touching the buffer.
  bool push(double t, std::span<const double> values);
  /// Convenience overload taking the five inertial channels.
  bool push(const ImuSample& sample);

  std::size_t channels() const noexcept { return channels_; }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t fill() const noexcept { return fill_; }
  bool full() const noexcept { return fill_ == capacity_; }

  /// p x m matrix, row j = channel j, columns oldest to newest.
  Matrix snapshot() const;
  /// Same layout written into `out` (size p*m), no allocation.
  void snapshot_into(std::span<double> out) const;

  double oldest_time() const;
  double newest_time() const;

  void clear() noexcept;

 private:
  std::size_t oldest_slot() const noexcept;
  void require_full() const;

  std::size_t channels_;
  std::size_t capacity_;
  std::vector<double> data_;  // channel-major, capacity_ slots per channel
  std::vector<double> times_;
  std::size_t head_ = 0;  // next slot to write
  std::size_t fill_ = 0;
};

}  // namespace crashdet
