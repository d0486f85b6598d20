#include "crashdet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "crashdet/butterworth.hpp"
#include "crashdet/errors.hpp"
#include "crashdet/format.hpp"
#include "crashdet/rng.hpp"

namespace crashdet::synth {

namespace {

constexpr std::size_t kFilterOrder = 4;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Unit-variance band-limited noise source.
class FilteredNoise {
 public:
  FilteredNoise(double cutoff, double fs) : filter_(kFilterOrder, cutoff, fs) {
    scale_ = 1.0 / std::sqrt(filter_.noise_power_gain());
    warmup_ = static_cast<std::size_t>(std::ceil(60.0 * fs / cutoff));
  }

  void prime(GaussianRng& rng) {
    for (std::size_t i = 0; i < warmup_; ++i) filter_.process(rng.normal());
  }

  double next(GaussianRng& rng) { return scale_ * filter_.process(rng.normal()); }

 private:
  ButterworthLowpass filter_;
  double scale_ = 1.0;
  std::size_t warmup_ = 0;
};

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be positive and finite");
}

}  // namespace

std::string_view to_string(RideStyle style) noexcept {
  return style == RideStyle::cautious ? "cautious" : "aggressive";
}

RideStyle parse_ride_style(std::string_view name) {
  if (name == "cautious") return RideStyle::cautious;
  if (name == "aggressive") return RideStyle::aggressive;
  throw ConfigError("unknown ride style '" + std::string(name) + "' (expected cautious or aggressive)");
}

std::string_view to_string(CrashKind kind) noexcept {
  switch (kind) {
    case CrashKind::lowside:
      return "lowside";
    case CrashKind::highside:
      return "highside";
    case CrashKind::sliding:
      return "sliding";
  }
  return "lowside";
}

CrashKind parse_crash_kind(std::string_view name) {
  if (name == "lowside") return CrashKind::lowside;
  if (name == "highside") return CrashKind::highside;
  if (name == "sliding") return CrashKind::sliding;
  throw ConfigError("unknown crash kind '" + std::string(name) + "' (expected lowside, highside or sliding)");
}

RideProfile RideProfile::for_style(RideStyle style, std::uint64_t seed) {
  RideProfile p;
  p.style = style;
  p.seed = seed;
  const double k = style == RideStyle::aggressive ? 2.0 : 1.0;
  for (std::size_t j = 0; j < kInertialChannels; ++j) p.channel_stddevs[j] = k * kCautiousStddevs[j];
  return p;
}

void RideProfile::validate() const {
  check_positive(sample_rate, "sample_rate");
  check_positive(band_limit, "band_limit");
  if (!(band_limit < sample_rate / 2.0))
    throw ConfigError("band_limit " + format_number(band_limit) + " Hz must be below fs/2");
  if (!(filter_ratio > 0.0) || !(filter_ratio <= 1.0)) throw ConfigError("filter_ratio must lie in (0, 1]");
  for (std::size_t j = 0; j < kInertialChannels; ++j)
    if (!(channel_stddevs[j] >= 0.0) || !std::isfinite(channel_stddevs[j]))
      throw ConfigError("channel stddev for " + std::string(kInertialNames[j]) + " must be finite and >= 0");
  if (!(sensor_noise >= 0.0) || !std::isfinite(sensor_noise)) throw ConfigError("sensor_noise must be >= 0");
  if (!std::isfinite(gravity_bias)) throw ConfigError("gravity_bias must be finite");
  if (speed) {
    if (!std::isfinite(speed_mean)) throw ConfigError("speed_mean must be finite");
    if (!(speed_stddev >= 0.0) || !std::isfinite(speed_stddev)) throw ConfigError("speed_stddev must be >= 0");
    check_positive(speed_tau, "speed_tau");
  }
}

CrashProfile CrashProfile::for_kind(CrashKind kind, double t0, double duration, std::uint64_t seed) {
  CrashProfile c;
  c.kind = kind;
  c.t0 = t0;
  c.duration = duration;
  c.seed = seed;
  c.freefall = kind != CrashKind::sliding;
  return c;
}

void CrashProfile::validate() const {
  if (!std::isfinite(t0)) throw ConfigError("crash t0 must be finite");
  if (!(duration >= min_duration && duration <= max_duration))
    throw ConfigError("crash duration " + format_number(duration) + " s outside [" + format_number(min_duration) +
                      ", " + format_number(max_duration) + "] s");
  if (broadband && !(burst_gain > 1.0 && std::isfinite(burst_gain)))
    throw ConfigError("burst_gain must exceed 1");
  if (structural) {
    check_positive(structural_gain, "structural_gain");
    check_positive(crash_band, "crash_band");
  }
  if (freefall) {
    check_positive(freefall_seconds, "freefall_seconds");
    if (freefall_seconds >= duration) throw ConfigError("freefall phase must be shorter than the crash");
  }
}

TraceFile generate_ride(const RideProfile& profile, double duration, double window_seconds) {
  profile.validate();
  if (!std::isfinite(duration) || !(duration >= 2.0 * window_seconds))
    throw ConfigError("ride duration " + format_number(duration) + " s is shorter than two windows (" +
                      format_number(2.0 * window_seconds) + " s)");

  const double fs = profile.sample_rate;
  const auto n = static_cast<std::size_t>(std::llround(duration * fs)) + 1;

  GaussianRng rng(profile.seed);
  std::vector<FilteredNoise> sources;
  for (std::size_t j = 0; j < kInertialChannels; ++j) sources.emplace_back(profile.filter_cutoff(), fs);
  for (auto& s : sources) s.prime(rng);

  const double rho = std::exp(-1.0 / (fs * profile.speed_tau));
  const double innovation = profile.speed_stddev * std::sqrt(1.0 - rho * rho);
  double wander = profile.speed_stddev * rng.normal();

  TraceFile trace;
  trace.header.sample_rate = fs;
  trace.header.has_speed = profile.speed;
  trace.header.metadata = {
      {"generator", "crashdet-synth/1"},
      {"rng", std::string(GaussianRng::kAlgorithm)},
      {"seed", std::to_string(profile.seed)},
      {"style", std::string(to_string(profile.style))},
      {"filter", "butterworth" + std::to_string(kFilterOrder) + "-bilinear"},
      {"filter_cutoff_hz", format_number(profile.filter_cutoff())},
      {"band_limit_hz", format_number(profile.band_limit)},
      {"sensor_noise", format_number(profile.sensor_noise)},
  };
  trace.rows.reserve(n);

  std::array<double, kInertialChannels> x{};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < kInertialChannels; ++j) {
      const double band = sources[j].next(rng);
      const double floor = profile.sensor_noise * rng.normal();
      x[j] = profile.channel_stddevs[j] * (band + floor);
    }
    ImuSample s;
    s.t = static_cast<double>(i) / fs;
    s.ax = x[0];
    s.ay = x[1];
    s.az = x[2] + profile.gravity_bias;
    s.wx = x[3];
    s.wz = x[4];
    if (profile.speed) {
      wander = rho * wander + innovation * rng.normal();
      s.speed = std::max(0.0, profile.speed_mean + wander);
    }
    trace.rows.push_back(s);
  }
  return trace;
}

TraceFile inject_crash(const TraceFile& trace, const CrashProfile& crash,
                       const std::array<double, kInertialChannels>& channel_stddevs) {
  crash.validate();
  if (trace.rows.empty()) throw ConfigError("cannot inject a crash into an empty trace");
  const double t_end = crash.t0 + crash.duration;
  if (crash.t0 < trace.rows.front().t || t_end > trace.rows.back().t)
    throw ConfigError("crash interval [" + format_number(crash.t0) + ", " + format_number(t_end) +
                      "] s lies outside the trace [" + format_number(trace.rows.front().t) + ", " +
                      format_number(trace.rows.back().t) + "] s");
  const double fs = trace.header.sample_rate;
  if (crash.structural && !(crash.crash_band < fs / 2.0)) throw ConfigError("crash_band must be below fs/2");

  TraceFile out = trace;
  out.labels.push_back({EventKind::crash, crash.t0, crash.duration});

  GaussianRng rng(crash.seed);
  const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
  std::vector<FilteredNoise> structure;
  if (crash.structural) {
    for (std::size_t j = 0; j < kInertialChannels; ++j) structure.emplace_back(crash.crash_band, fs);
    for (auto& s : structure) s.prime(rng);
  }

  constexpr std::array<double, 3> kImpactDirection{-1.5 * kGravity, 0.8 * kGravity, 3.6 * kGravity};
  constexpr std::array<double, 3> kImpactPulse{0.85, 1.0, 0.85};
  constexpr double kFreefallResidual = 0.05 * kGravity;
  constexpr double kFreefallRoll = 2.4;  // rad/s
  std::size_t impact_index = 0;

  for (auto& s : out.rows) {
    if (s.t < crash.t0 || s.t >= t_end) continue;
    const double tau = s.t - crash.t0;
    std::array<double*, kInertialChannels> ch{&s.ax, &s.ay, &s.az, &s.wx, &s.wz};

    if (crash.broadband)
      for (std::size_t j = 0; j < kInertialChannels; ++j) *ch[j] += crash.burst_gain * channel_stddevs[j] * rng.normal();
    if (crash.structural)
      for (std::size_t j = 0; j < kInertialChannels; ++j)
        *ch[j] += crash.structural_gain * channel_stddevs[j] * structure[j].next(rng);

    if (crash.kind_motion) {
      switch (crash.kind) {
        case CrashKind::lowside:
          s.wx += side * 1.5 * std::exp(-tau / 3.0);
          break;
        case CrashKind::highside:
          if (tau < 2.5) s.wx += 3.0 * std::sin(2.0 * std::numbers::pi * 1.2 * tau);
          break;
        case CrashKind::sliding:
          s.ax += -0.6 * kGravity;
          break;
      }
    }

    if (crash.freefall) {
      if (tau < crash.freefall_seconds) {
        s.ax = kFreefallResidual * rng.normal();
        s.ay = kFreefallResidual * rng.normal();
        s.az = kFreefallResidual * rng.normal();
        s.wx = side * kFreefallRoll + 0.05 * rng.normal();
        s.wz = 0.05 * rng.normal();
      } else if (impact_index < kImpactPulse.size()) {
        s.ax = kImpactPulse[impact_index] * kImpactDirection[0];
        s.ay = kImpactPulse[impact_index] * kImpactDirection[1];
        s.az = kImpactPulse[impact_index] * kImpactDirection[2];
        ++impact_index;
      }
    }

    if (s.speed) s.speed = *s.speed * (1.0 - tau / crash.duration);
  }
  return out;
}

std::vector<SuiteEntry> standard_suite(std::uint64_t seed, double nominal_seconds, double crash_trace_seconds) {
  struct Row {
    const char* name;
    CrashKind kind;
    double duration;
  };
  constexpr std::array<Row, 7> kCrashes{{{"front-lowside-i", CrashKind::lowside, 10.0},
                                         {"front-lowside-ii", CrashKind::lowside, 8.0},
                                         {"cornering-lowside", CrashKind::lowside, 10.0},
                                         {"highside-i", CrashKind::highside, 7.0},
                                         {"highside-ii", CrashKind::highside, 9.0},
                                         {"sliding-i", CrashKind::sliding, 6.0},
                                         {"sliding-ii", CrashKind::sliding, 14.0}}};

  std::vector<SuiteEntry> suite;
  std::uint64_t stream = splitmix64(seed);
  auto next_seed = [&stream] { return stream = splitmix64(stream); };

  for (std::size_t i = 0; i < kCrashes.size(); ++i) {
    const auto style = i % 2 == 0 ? RideStyle::cautious : RideStyle::aggressive;
    SuiteEntry e;
    e.name = kCrashes[i].name;
    e.ride = RideProfile::for_style(style, next_seed());
    e.duration = crash_trace_seconds;
    const double t0 = std::floor(crash_trace_seconds / 2.0);
    e.crash = CrashProfile::for_kind(kCrashes[i].kind, t0, kCrashes[i].duration, next_seed());
    suite.push_back(std::move(e));
  }
  for (const auto style : {RideStyle::cautious, RideStyle::aggressive}) {
    SuiteEntry e;
    e.name = "nominal-" + std::string(to_string(style));
    e.ride = RideProfile::for_style(style, next_seed());
    e.duration = nominal_seconds;
    suite.push_back(std::move(e));
  }
  return suite;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

TraceFile build(const SuiteEntry& entry) {
  TraceFile trace = generate_ride(entry.ride, entry.duration);
  trace.header.metadata.emplace_back("trace", entry.name);
  if (entry.crash) {
    trace = inject_crash(trace, *entry.crash, entry.ride.channel_stddevs);
    trace.header.metadata.emplace_back("crash_kind", std::string(to_string(entry.crash->kind)));
    trace.header.metadata.emplace_back("crash_seed", std::to_string(entry.crash->seed));
  }
  return trace;
}

}  // namespace crashdet::synth
