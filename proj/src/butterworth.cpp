#include "crashdet/butterworth.hpp"

#include <cmath>
#include <numbers>

#include "crashdet/errors.hpp"
#include "crashdet/format.hpp"

namespace crashdet {

ButterworthLowpass::ButterworthLowpass(std::size_t order, double cutoff_hz, double sample_rate)
    : cutoff_(cutoff_hz), sample_rate_(sample_rate) {
  if (order == 0 || order % 2 != 0) throw ConfigError("Butterworth order must be even and positive");
  if (!(sample_rate > 0.0) || !(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate / 2.0))
    throw ConfigError("Butterworth cutoff " + format_number(cutoff_hz) + " Hz must lie in (0, fs/2)");

  const double w0 = 2.0 * std::numbers::pi * cutoff_hz / sample_rate;
  const double cw = std::cos(w0);
  const double sw = std::sin(w0);
  for (std::size_t k = 0; k < order / 2; ++k) {
    const double theta = std::numbers::pi * static_cast<double>(2 * k + 1) / static_cast<double>(2 * order);
    const double q = 1.0 / (2.0 * std::cos(theta));
    const double alpha = sw / (2.0 * q);
    const double a0 = 1.0 + alpha;
    sections_.push_back({(1.0 - cw) / 2.0 / a0, (1.0 - cw) / a0, (1.0 - cw) / 2.0 / a0, -2.0 * cw / a0,
                         (1.0 - alpha) / a0});
  }
}

double ButterworthLowpass::process(double x) noexcept {
  // transposed direct form II
  for (auto& s : sections_) {
    const double y = s.b0 * x + s.z1;
    s.z1 = s.b1 * x - s.a1 * y + s.z2;
    s.z2 = s.b2 * x - s.a2 * y;
    x = y;
  }
  return x;
}

void ButterworthLowpass::reset() noexcept {
  for (auto& s : sections_) s.z1 = s.z2 = 0.0;
}

double ButterworthLowpass::noise_power_gain() const {
  ButterworthLowpass probe = *this;
  probe.reset();
  // the slowest pole pair decays within a few hundred cutoff periods
  const auto taps = static_cast<std::size_t>(400.0 * sample_rate_ / cutoff_) + 1024;
  double energy = 0.0;
  for (std::size_t n = 0; n < taps; ++n) {
    const double h = probe.process(n == 0 ? 1.0 : 0.0);
    energy += h * h;
  }
  return energy;
}

}  // namespace crashdet
