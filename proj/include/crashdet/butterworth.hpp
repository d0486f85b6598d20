#pragma once

#include <cstddef>
#include <vector>

namespace crashdet {

/// Even-order Butterworth low-pass built as a cascade of bilinear-transform
/// biquads (prewarped at the cutoff).
class ButterworthLowpass {
 public:
  ButterworthLowpass(std::size_t order, double cutoff_hz, double sample_rate);

  double process(double x) noexcept;
  void reset() noexcept;

  /// Sum of squared impulse-response taps, i.e. the white-noise power gain.
  double noise_power_gain() const;

  std::size_t order() const noexcept { return 2 * sections_.size(); }
  double cutoff() const noexcept { return cutoff_; }

 private:
  struct Biquad {
    double b0, b1, b2, a1, a2;
    double z1 = 0.0;
    double z2 = 0.0;
  };
  std::vector<Biquad> sections_;
  double cutoff_;
  double sample_rate_;
};

}  // namespace crashdet
