#pragma once

// Hand-rolled random generators for the property tests. Every test seeds its
// own Gen so failures replay exactly.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "crashdet/imu.hpp"
#include "crashdet/spectral.hpp"
#include "crashdet/trace.hpp"
#include "crashdet/verdict.hpp"

namespace gen {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
  std::uint64_t bits() { return engine_(); }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[index(items.size())];
  }

 private:
  std::mt19937_64 engine_;
};

/// Strictly positive spectrum, log-uniform over six decades.
inline crashdet::spectral::Spectrum positive_spectrum(Gen& g, std::size_t m) {
  crashdet::spectral::Spectrum s;
  s.bins.resize(m);
  for (auto& b : s.bins) b = std::exp(g.uniform(-3.0, 3.0) * std::log(10.0));
  return s;
}

/// Real even spectrum (Phi[k] == Phi[m-k]) as a real signal would produce.
inline crashdet::spectral::Spectrum even_spectrum(Gen& g, std::size_t m) {
  auto s = positive_spectrum(g, m);
  for (std::size_t k = 1; k < m / 2; ++k) s.bins[m - k] = s.bins[k];
  return s;
}

inline std::vector<double> signal(Gen& g, std::size_t m, double scale = 1.0) {
  std::vector<double> x(m);
  for (auto& v : x) v = scale * g.normal();
  return x;
}

inline crashdet::Matrix window(Gen& g, std::size_t p, std::size_t m, double scale = 1.0) {
  crashdet::Matrix w(p, m);
  for (auto& v : w.data()) v = scale * g.normal();
  return w;
}

inline crashdet::spectral::CepstraMatrix cepstra(Gen& g, std::size_t p, std::size_t m) {
  crashdet::spectral::CepstraMatrix c(p, m);
  const double scale = g.uniform(0.01, 5.0);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < m; ++k) c(j, k) = scale * g.normal();
  return c;
}

/// A valid trace on the 1/fs grid with random values and optional speed.
/// Values span several magnitudes so the 9-digit quantization is exercised.
inline crashdet::TraceFile trace(Gen& g, std::size_t rows, bool with_speed, double fs = 100.0) {
  crashdet::TraceFile t;
  t.header.sample_rate = fs;
  t.header.has_speed = with_speed;
  t.header.metadata = {{"generator", "property-test"}, {"seed", std::to_string(g.bits() % 1000)}};
  const double t0 = g.uniform(0.0, 1000.0);
  for (std::size_t i = 0; i < rows; ++i) {
    crashdet::ImuSample s;
    s.t = t0 + static_cast<double>(i) / fs;
    const double mag = std::pow(10.0, g.uniform(-6.0, 4.0));
    s.ax = mag * g.normal();
    s.ay = g.normal();
    s.az = crashdet::kGravity + g.normal();
    s.wx = 1e-3 * g.normal();
    s.wz = 123.456789123 * g.normal();
    if (with_speed) s.speed = g.uniform(0.0, 60.0);
    t.rows.push_back(s);
  }
  if (rows > 10 && g.coin()) t.labels.push_back({crashdet::EventKind::crash, t.rows[rows / 3].t, g.uniform(0.1, 5.0)});
  return t;
}

/// Verdict stream on a 1/fs grid with runs of random length.
inline std::vector<crashdet::DetectorVerdict> verdicts(Gen& g, std::size_t n, double t0, double fs = 100.0,
                                                       double p_switch = 0.02) {
  std::vector<crashdet::DetectorVerdict> v(n);
  bool flag = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (g.coin(p_switch)) flag = !flag;
    v[i].t = t0 + static_cast<double>(i) / fs;
    v[i].flag = flag;
  }
  return v;
}

}  // namespace gen
