#include "crashdet/debounce.hpp"

#include "crashdet/errors.hpp"

namespace crashdet {

Debouncer::Debouncer(std::size_t on_count, std::size_t off_count) : on_count_(on_count), off_count_(off_count) {
  if (on_count == 0 || off_count == 0) throw ConfigError("debounce counts must be at least 1");
}

bool Debouncer::step(bool raw) noexcept {
  if (raw == state_) {
    run_ = 0;
    return state_;
  }
  ++run_;
  if (run_ >= (state_ ? off_count_ : on_count_)) {
    state_ = raw;
    run_ = 0;
  }
  return state_;
}

void Debouncer::reset() noexcept {
  run_ = 0;
  state_ = false;
}

std::vector<DetectorVerdict> debounce(std::span<const DetectorVerdict> verdicts, std::size_t on_count,
                                      std::size_t off_count) {
  Debouncer d(on_count, off_count);
  std::vector<DetectorVerdict> out(verdicts.begin(), verdicts.end());
  for (auto& v : out) v.flag = d.step(v.flag);
  return out;
}

}  // namespace crashdet
