#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "crashdet/verdict.hpp"

namespace crashdet {

/// Two-counter hysteresis on a boolean stream: the output turns ON after
/// `on_count` consecutive raw ONs and OFF after `off_count` consecutive raw
/// OFFs. (1, 1) is the identity.
class Debouncer {
 public:
  Debouncer(std::size_t on_count, std::size_t off_count);

  bool step(bool raw) noexcept;
  bool state() const noexcept { return state_; }
  void reset() noexcept;

 private:
  std::size_t on_count_;
  std::size_t off_count_;
  std::size_t run_ = 0;
  bool state_ = false;
};

/// Replaces each verdict's flag with the debounced flag; time, score and
/// readiness are kept, so detection latency includes the debounce delay.
std::vector<DetectorVerdict> debounce(std::span<const DetectorVerdict> verdicts, std::size_t on_count,
                                      std::size_t off_count);

}  // namespace crashdet
