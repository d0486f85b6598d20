#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace crashdet {

/// Portable Gaussian source. std::normal_distribution is implementation
/// defined, so normals come from a hand-rolled Box-Muller transform over
/// mt19937_64, whose output sequence is fixed by the standard.
class GaussianRng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64+box-muller";

  explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1], 53-bit resolution.
  double uniform() noexcept { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  std::uint64_t next_u64() noexcept { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace crashdet
