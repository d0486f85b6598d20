#include "crashdet/window_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crashdet/errors.hpp"

namespace crashdet {

WindowBuffer::WindowBuffer(std::size_t channels, std::size_t capacity)
    : channels_(channels), capacity_(capacity), data_(channels * capacity), times_(capacity) {
  if (channels == 0 || capacity == 0) throw ConfigError("window buffer needs at least one channel and one slot");
}

bool WindowBuffer::push(double t, std::span<const double> values) {
  if (values.size() != channels_)
    throw DimensionError("window buffer expects " + std::to_string(channels_) + " channels, got " +
                         std::to_string(values.size()));
  for (std::size_t j = 0; j < channels_; ++j) {
    if (!std::isfinite(values[j])) {
      const std::string name =
          channels_ == kInertialChannels ? std::string(kInertialNames[j]) : "channel " + std::to_string(j);
      throw NonFiniteSampleError(name, t);
    }
  }
  for (std::size_t j = 0; j < channels_; ++j) data_[j * capacity_ + head_] = values[j];
  times_[head_] = t;
  head_ = (head_ + 1) % capacity_;
  if (fill_ < capacity_) ++fill_;
  return full();
}

bool WindowBuffer::push(const ImuSample& sample) {
  const auto values = sample.inertial();
  return push(sample.t, values);
}

std::size_t WindowBuffer::oldest_slot() const noexcept { return fill_ < capacity_ ? 0 : head_; }

void WindowBuffer::require_full() const {
  if (!full())
    throw NotReadyError("window not full: " + std::to_string(fill_) + " of " + std::to_string(capacity_) +
                        " samples");
}

Matrix WindowBuffer::snapshot() const {
  Matrix out(channels_, capacity_);
  snapshot_into(out.data());
  return out;
}

void WindowBuffer::snapshot_into(std::span<double> out) const {
  require_full();
  if (out.size() != channels_ * capacity_) throw DimensionError("snapshot destination has wrong size");
  const std::size_t first = oldest_slot();
  const std::size_t tail = capacity_ - first;
  for (std::size_t j = 0; j < channels_; ++j) {
    const double* src = data_.data() + j * capacity_;
    double* dst = out.data() + j * capacity_;
    std::copy(src + first, src + capacity_, dst);
    std::copy(src, src + first, dst + tail);
  }
}

double WindowBuffer::oldest_time() const {
  if (fill_ == 0) throw NotReadyError("window is empty");
  return times_[oldest_slot()];
}

double WindowBuffer::newest_time() const {
  if (fill_ == 0) throw NotReadyError("window is empty");
  return times_[(head_ + capacity_ - 1) % capacity_];
}

void WindowBuffer::clear() noexcept {
  head_ = 0;
  fill_ = 0;
}

}  // namespace crashdet
