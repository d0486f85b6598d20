#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>

#include "crashdet/calibration.hpp"
#include "crashdet/cepstral_detector.hpp"
#include "crashdet/debounce.hpp"
#include "crashdet/errors.hpp"
#include "crashdet/eval.hpp"
#include "crashdet/format.hpp"
#include "crashdet/kv.hpp"
#include "crashdet/mahalanobis.hpp"
#include "crashdet/model_io.hpp"
#include "crashdet/synth.hpp"
#include "crashdet/threshold_detector.hpp"
#include "crashdet/trace.hpp"
#include "crashdet/verdict_io.hpp"

namespace crashdet::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kManifestFormat = "crashdet-manifest/1";

// Shortest text that parses back to the same double.
std::string render(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}
std::string render(const std::string& v) { return v; }
std::string render(bool v) { return v ? "true" : "false"; }
std::string render(std::size_t v) { return std::to_string(v); }
std::string render(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i > 0 ? "," : "") + v[i];
  return s;
}

/// A subcommand plus a registry of its options, so the resolved values can
/// be echoed to the run manifest under the same keys the config file uses.
class Command {
 public:
  Command(CLI::App& app, std::string name, std::string description)
      : name_(std::move(name)), app_(app.add_subcommand(name_, std::move(description))) {
    app_->add_option("--config", config_path_, "Flat key=value file (or a previous run manifest); flags override it");
    option("out-dir", out_dir_, "Directory for outputs and the run manifest");
  }

  template <typename T>
  CLI::Option* option(const std::string& key, T& target, std::string description) {
    auto* opt = app_->add_option("--" + key, target, std::move(description))->capture_default_str();
    if constexpr (std::is_same_v<T, std::vector<std::string>>) opt->delimiter(',');
    getters_.emplace_back(key, [&target] { return render(target); });
    return opt;
  }

  CLI::Option* flag(const std::string& key, bool& target, std::string description) {
    flags_.insert(key);
    getters_.emplace_back(key, [&target] { return render(target); });
    return app_->add_flag("--" + key, target, std::move(description));
  }

  /// Extra derived values echoed under `resolved.*`; ignored when the
  /// manifest is fed back through --config.
  void resolved(std::string key, std::string value) { resolved_.emplace_back(std::move(key), std::move(value)); }

  const std::string& name() const noexcept { return name_; }
  CLI::App* app() const noexcept { return app_; }
  const fs::path& out_dir() const noexcept { return out_dir_path_; }

  /// Appends `--key=value` for every config entry not given on the command line.
  void inject_config(std::vector<std::string>& args) const {
    std::optional<std::string> path;
    for (std::size_t i = 1; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (!path) return;
    KvDocument doc;
    try {
      doc = KvDocument::load(*path);
    } catch (const DataError& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    auto given = [&](const std::string& key) {
      return std::any_of(args.begin() + 1, args.end(), [&](const std::string& a) {
        return a == "--" + key || a.rfind("--" + key + "=", 0) == 0;
      });
    };
    std::vector<std::string> extra;
    for (const auto& [key, value] : doc.entries()) {
      if (key == "format") {
        if (value != kManifestFormat) throw ConfigError("config: unknown format '" + value + "'");
        continue;
      }
      if (key == "command") {
        if (value != name_) throw ConfigError("config: manifest is for '" + value + "', not '" + name_ + "'");
        continue;
      }
      if (key.rfind("resolved.", 0) == 0) continue;
      const bool known = std::any_of(getters_.begin(), getters_.end(), [&](const auto& g) { return g.first == key; });
      if (!known) throw ConfigError("config: unknown key '" + key + "' for " + name_);
      if (given(key) || value.empty()) continue;
      if (flags_.count(key)) {
        if (value == "true")
          extra.push_back("--" + key);
        else if (value != "false")
          throw ConfigError("config: key '" + key + "' must be true or false");
        continue;
      }
      extra.push_back("--" + key + "=" + value);
    }
    args.insert(args.end(), extra.begin(), extra.end());
  }

  void prepare_output() {
    out_dir_path_ = out_dir_;
    std::error_code ec;
    fs::create_directories(out_dir_path_, ec);
    if (ec) throw DataError("cannot create output directory " + out_dir_ + ": " + ec.message());
  }

  void write_manifest() const {
    KvDocument doc;
    doc.set("format", std::string(kManifestFormat));
    doc.set("command", name_);
    for (const auto& [key, get] : getters_) doc.set(key, get());
    for (const auto& [key, value] : resolved_) doc.set("resolved." + key, value);
    doc.save(out_dir_path_ / (name_ + ".manifest"));
  }

 private:
  std::string name_;
  CLI::App* app_;
  std::string config_path_;
  std::string out_dir_ = ".";
  fs::path out_dir_path_;
  std::vector<std::pair<std::string, std::function<std::string()>>> getters_;
  std::set<std::string> flags_;
  std::vector<std::pair<std::string, std::string>> resolved_;
};

struct CepstralOptions {
  double window_seconds = 10.0;
  double sample_rate = kDefaultSampleRate;
  double gamma = 0.029;
  double floor = spectral::kDefaultFloor;
  std::size_t hop = 1;
  std::string taper = "rectangular";
  std::size_t order = 0;

  void add_to(Command& c, bool with_gamma) {
    c.option("window-seconds", window_seconds, "Nominal cepstral window w (s); rounded up to a power of two");
    c.option("sample-rate", sample_rate, "Expected trace sample rate (Hz)");
    if (with_gamma) c.option("gamma", gamma, "Cepstral threshold gamma_cep");
    c.option("floor", floor, "Periodogram floor before the logarithm");
    c.option("hop", hop, "Re-score every HOP samples");
    c.option("taper", taper, "Window taper: rectangular or hann");
    c.option("order", order, "Martin truncation order K, 0 for the full window");
  }

  CepstralConfig config() const {
    CepstralConfig cfg;
    cfg.window_seconds = window_seconds;
    cfg.sample_rate = sample_rate;
    cfg.gamma = gamma;
    cfg.floor = floor;
    cfg.hop = hop;
    if (taper == "rectangular")
      cfg.taper = spectral::Taper::rectangular;
    else if (taper == "hann")
      cfg.taper = spectral::Taper::hann;
    else
      throw ConfigError("unknown taper '" + taper + "' (expected rectangular or hann)");
    cfg.order = order;
    cfg.validate();
    return cfg;
  }

  void echo(Command& c, const CepstralConfig& cfg) const {
    c.resolved("window_samples", std::to_string(cfg.window_length()));
    c.resolved("effective_window_s", format_number(cfg.effective_window_seconds()));
    c.resolved("truncation_order", std::to_string(cfg.truncation_order()));
  }
};

double resolve_pad(const std::string& text, double fallback) {
  if (text == "auto") return fallback;
  double v = 0.0;
  if (!parse_double(text, v) || !std::isfinite(v) || v < 0.0)
    throw ConfigError("pad must be 'auto' or a non-negative number of seconds, got '" + text + "'");
  return v;
}

void require_files(const std::vector<std::string>& paths, const char* what) {
  for (const auto& p : paths)
    if (!fs::is_regular_file(p)) throw ConfigError(std::string(what) + " not found: " + p);
}

/// Trace stems name every per-trace output, so they must be unique.
std::vector<std::string> unique_stems(const std::vector<std::string>& paths) {
  std::vector<std::string> stems;
  std::set<std::string> seen;
  for (const auto& p : paths) {
    auto stem = fs::path(p).stem().string();
    if (!seen.insert(stem).second) throw ConfigError("two inputs share the stem '" + stem + "'");
    stems.push_back(std::move(stem));
  }
  return stems;
}

/// Runs `fn(i)` for every index on its own task and returns results in index
/// order; the first exception (by index) is rethrown.
template <typename Fn>
auto fan_out(std::size_t n, Fn fn) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<std::future<R>> futures;
  futures.reserve(n);
  for (std::size_t i = 0; i < n; ++i) futures.push_back(std::async(std::launch::async, fn, i));
  std::vector<R> results;
  results.reserve(n);
  for (auto& f : futures) results.push_back(f.get());
  return results;
}

std::vector<TraceFile> load_traces(const std::vector<std::string>& paths, double sample_rate) {
  auto traces = fan_out(paths.size(), [&](std::size_t i) { return parse_trace(paths[i]); });
  for (std::size_t i = 0; i < traces.size(); ++i)
    if (traces[i].header.sample_rate != sample_rate)
      throw ConfigError("trace " + paths[i] + " declares fs=" + format_number(traces[i].header.sample_rate) +
                        " Hz but the configuration expects " + format_number(sample_rate) + " Hz");
  return traces;
}

// ---------------------------------------------------------------- simulate

struct SimulateCommand {
  Command cmd;
  std::uint64_t seed = 1;
  double duration = 600.0;
  std::string style = "cautious";
  double band_limit = 10.0;
  double sample_rate = kDefaultSampleRate;
  double sensor_noise = synth::RideProfile{}.sensor_noise;
  double window_seconds = 10.0;
  std::vector<std::string> crashes;
  bool suite = false;
  double nominal_seconds = 1800.0;
  double crash_trace_seconds = 120.0;
  std::string name = "ride";

  explicit SimulateCommand(CLI::App& app) : cmd(app, "simulate", "Generate synthetic IMU traces with crash labels") {
    cmd.option("seed", seed, "Generator seed");
    cmd.option("duration", duration, "Ride length (s)");
    cmd.option("style", style, "Ride style: cautious or aggressive");
    cmd.option("band-limit", band_limit, "Nominal band edge (Hz)");
    cmd.option("sample-rate", sample_rate, "Sample rate (Hz)");
    cmd.option("sensor-noise", sensor_noise, "White sensor floor relative to the channel stddev");
    cmd.option("window-seconds", window_seconds, "Detector window w (s); rides must last at least 2 w");
    cmd.option("crash", crashes, "Crash KIND@T0[:DURATION], KIND in lowside|highside|sliding (repeatable)");
    cmd.flag("suite", suite, "Write the standard suite: 7 crash traces plus one nominal trace per style");
    cmd.option("nominal-seconds", nominal_seconds, "Suite: length of each nominal trace (s)");
    cmd.option("crash-trace-seconds", crash_trace_seconds, "Suite: length of each crash trace (s)");
    cmd.option("name", name, "Output stem for a single trace");
  }

  static synth::CrashProfile parse_crash(const std::string& spec, std::uint64_t seed) {
    const auto at = spec.find('@');
    if (at == std::string::npos) throw ConfigError("crash '" + spec + "' is not KIND@T0[:DURATION]");
    const auto kind = synth::parse_crash_kind(spec.substr(0, at));
    const auto rest = spec.substr(at + 1);
    const auto colon = rest.find(':');
    double t0 = 0.0;
    double dur = 8.0;
    if (!parse_double(rest.substr(0, colon), t0) || !std::isfinite(t0))
      throw ConfigError("crash '" + spec + "' has a malformed start time");
    if (colon != std::string::npos && (!parse_double(rest.substr(colon + 1), dur) || !std::isfinite(dur)))
      throw ConfigError("crash '" + spec + "' has a malformed duration");
    auto c = synth::CrashProfile::for_kind(kind, t0, dur, seed);
    c.validate();
    return c;
  }

  synth::RideProfile ride(synth::RideStyle s, std::uint64_t ride_seed) const {
    auto p = synth::RideProfile::for_style(s, ride_seed);
    p.band_limit = band_limit;
    p.sample_rate = sample_rate;
    p.sensor_noise = sensor_noise;
    p.validate();
    return p;
  }

  void execute(std::ostream& out) {
    CepstralConfig window;
    window.window_seconds = window_seconds;
    window.sample_rate = sample_rate;
    window.validate();
    const double w = window.effective_window_seconds();
    cmd.resolved("effective_window_s", format_number(w));

    if (suite) {
      if (!crashes.empty()) throw ConfigError("--suite and --crash are mutually exclusive");
      auto entries = synth::standard_suite(seed, nominal_seconds, crash_trace_seconds);
      for (auto& e : entries) {
        e.ride = ride(e.ride.style, e.ride.seed);
        if (e.duration < 2.0 * w) throw ConfigError("suite trace " + e.name + " is shorter than 2 w");
        if (e.crash && e.crash->t0 + e.crash->duration > e.duration)
          throw ConfigError("--crash-trace-seconds too short for crash " + e.name);
      }
      cmd.prepare_output();
      const auto traces = fan_out(entries.size(), [&](std::size_t i) { return synth::build(entries[i]); });
      for (std::size_t i = 0; i < entries.size(); ++i) {
        write_trace(traces[i], cmd.out_dir() / (entries[i].name + ".csv"));
        out << entries[i].name << ".csv " << traces[i].rows.size() << " samples, " << traces[i].labels.size()
            << " crash label(s)\n";
      }
      cmd.write_manifest();
      return;
    }

    const auto profile = ride(synth::parse_ride_style(style), seed);
    std::vector<synth::CrashProfile> profiles;
    for (std::size_t i = 0; i < crashes.size(); ++i) profiles.push_back(parse_crash(crashes[i], synth::derive_seed(seed, i + 1)));
    std::sort(profiles.begin(), profiles.end(), [](const auto& a, const auto& b) { return a.t0 < b.t0; });
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      if (profiles[i].t0 < 0.0 || profiles[i].t0 + profiles[i].duration > duration)
        throw ConfigError("crash at " + format_number(profiles[i].t0) + " s does not fit in a " +
                          format_number(duration) + " s ride");
      if (i > 0 && profiles[i].t0 < profiles[i - 1].t0 + profiles[i - 1].duration)
        throw ConfigError("crashes at " + format_number(profiles[i - 1].t0) + " s and " +
                          format_number(profiles[i].t0) + " s overlap");
    }
    if (!std::isfinite(duration) || duration < 2.0 * w)
      throw ConfigError("--duration " + format_number(duration) + " s is shorter than two windows (" +
                        format_number(2.0 * w) + " s)");
    if (name.empty() || name.find('/') != std::string::npos) throw ConfigError("--name must be a plain file stem");

    cmd.prepare_output();
    auto trace = synth::generate_ride(profile, duration, w);
    for (const auto& c : profiles) trace = synth::inject_crash(trace, c, profile.channel_stddevs);
    trace.header.metadata.emplace_back("trace", name);
    const auto path = cmd.out_dir() / (name + ".csv");
    write_trace(trace, path);
    out << path.filename().string() << ' ' << trace.rows.size() << " samples, " << trace.labels.size()
        << " crash label(s)\n";
    cmd.write_manifest();
  }
};

// --------------------------------------------------------------------- fit

struct FitCommand {
  Command cmd;
  std::vector<std::string> traces;
  std::string features = "inertial";
  double alpha = 0.05;
  std::string exclude_pad = "auto";
  double sample_rate = kDefaultSampleRate;
  std::string model = "mahalanobis.model";

  explicit FitCommand(CLI::App& app) : cmd(app, "fit", "Fit the Mahalanobis model on nominal riding") {
    cmd.option("trace", traces, "Training trace (repeatable); labelled crash windows are excluded");
    cmd.option("features", features, "Feature set: inertial, inertial+speed or speed+ax");
    cmd.option("alpha", alpha, "Outlier level of the F-quantile threshold");
    cmd.option("exclude-pad", exclude_pad, "Seconds excluded around each crash label, or 'auto' (10.24)");
    cmd.option("sample-rate", sample_rate, "Expected trace sample rate (Hz)");
    cmd.option("model", model, "Model file name inside --out-dir");
  }

  void execute(std::ostream& out) {
    if (traces.empty()) throw ConfigError("fit needs at least one --trace");
    require_files(traces, "trace");
    const auto set = parse_feature_set(features);
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("--alpha must lie in (0, 1)");
    CepstralConfig window;
    window.sample_rate = sample_rate;
    window.validate();
    const double pad = resolve_pad(exclude_pad, window.effective_window_seconds());
    cmd.resolved("exclude_pad_s", format_number(pad));
    if (model.empty() || fs::path(model).has_parent_path()) throw ConfigError("--model must be a plain file name");

    cmd.prepare_output();
    const auto loaded = load_traces(traces, sample_rate);
    std::vector<ImuSample> rows;
    for (const auto& t : loaded) {
      for (const auto& s : t.rows) {
        const bool excluded = std::any_of(t.labels.begin(), t.labels.end(), [&](const TraceEvent& e) {
          return e.kind == EventKind::crash && s.t >= e.start_t - pad && s.t <= e.end_t() + pad;
        });
        if (!excluded) rows.push_back(s);
      }
    }
    const auto fitted = mahalanobis_fit(feature_matrix(rows, set), alpha);
    model_to_kv(fitted, set).save(cmd.out_dir() / model);
    out << "fitted " << to_string(set) << " model on " << fitted.sample_count()
        << " samples, gamma=" << format_number(fitted.gamma()) << '\n';
    cmd.write_manifest();
  }
};

// ------------------------------------------------------------------ detect

std::vector<DetectorId> parse_detectors(const std::string& text) {
  if (text == "all") return {DetectorId::threshold, DetectorId::mahalanobis, DetectorId::cepstral};
  std::vector<DetectorId> ids;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const auto id = parse_detector_id(text.substr(start, comma == std::string::npos ? comma : comma - start));
    if (std::find(ids.begin(), ids.end(), id) != ids.end())
      throw ConfigError("detector '" + std::string(to_string(id)) + "' listed twice");
    ids.push_back(id);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return ids;
}

struct DetectCommand {
  Command cmd;
  std::vector<std::string> traces;
  std::string detector = "cepstral";
  CepstralOptions cepstral;
  double gamma_a = ThresholdConfig{}.gamma_a;
  double gamma_omega = ThresholdConfig{}.gamma_omega;
  std::string model;
  std::size_t debounce_on = 1;
  std::size_t debounce_off = 1;
  bool emit_scores = false;

  explicit DetectCommand(CLI::App& app) : cmd(app, "detect", "Run detectors over traces and write verdict streams") {
    cmd.option("trace", traces, "Input trace (repeatable)");
    cmd.option("detector", detector, "cepstral, threshold, mahalanobis, a comma list of them, or all");
    cepstral.add_to(cmd, true);
    cmd.option("gamma-a", gamma_a, "Threshold detector: acceleration-norm bound (m/s^2)");
    cmd.option("gamma-omega", gamma_omega, "Threshold detector: roll/yaw-rate-norm bound (rad/s)");
    cmd.option("model", model, "Mahalanobis model file written by fit");
    cmd.option("debounce-on", debounce_on, "Consecutive raw ONs before the output turns ON");
    cmd.option("debounce-off", debounce_off, "Consecutive raw OFFs before the output turns OFF");
    cmd.flag("emit-scores", emit_scores, "Also write STEM.DETECTOR.scores.csv");
  }

  void execute(std::ostream& out) {
    if (traces.empty()) throw ConfigError("detect needs at least one --trace");
    require_files(traces, "trace");
    const auto stems = unique_stems(traces);
    const auto detectors = parse_detectors(detector);
    const auto ccfg = cepstral.config();
    cepstral.echo(cmd, ccfg);
    const ThresholdConfig tcfg{gamma_a, gamma_omega};
    tcfg.validate();
    const Debouncer validated(debounce_on, debounce_off);
    (void)validated;

    std::optional<StoredModel> stored;
    if (std::find(detectors.begin(), detectors.end(), DetectorId::mahalanobis) != detectors.end()) {
      if (model.empty()) throw ConfigError("the mahalanobis detector needs --model");
      if (!fs::is_regular_file(model)) throw ConfigError("model not found: " + model);
      stored = model_from_kv(KvDocument::load(model));
      cmd.resolved("mahalanobis_gamma", format_number(stored->model.gamma()));
    }

    cmd.prepare_output();
    const auto loaded = load_traces(traces, ccfg.sample_rate);

    struct Job {
      std::size_t trace;
      DetectorId id;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < loaded.size(); ++i)
      for (const auto id : detectors) jobs.push_back({i, id});

    const auto summaries = fan_out(jobs.size(), [&](std::size_t j) {
      const auto& job = jobs[j];
      const auto& rows = loaded[job.trace].rows;
      std::vector<DetectorVerdict> verdicts;
      switch (job.id) {
        case DetectorId::cepstral:
          verdicts = run_cepstral(rows, ccfg);
          break;
        case DetectorId::threshold:
          verdicts = run_threshold(rows, tcfg);
          break;
        case DetectorId::mahalanobis:
          verdicts = run_mahalanobis(rows, stored->model, stored->features);
          break;
      }
      verdicts = debounce(verdicts, debounce_on, debounce_off);
      const std::string base = stems[job.trace] + "." + std::string(to_string(job.id));
      write_verdicts(verdicts, job.id, cmd.out_dir() / (base + ".verdicts.csv"));
      if (emit_scores) write_scores(verdicts, job.id, cmd.out_dir() / (base + ".scores.csv"));
      std::size_t on = 0;
      std::size_t rises = 0;
      bool prev = false;
      for (const auto& v : verdicts) {
        on += v.flag ? 1 : 0;
        rises += (v.flag && !prev) ? 1 : 0;
        prev = v.flag;
      }
      return base + ".verdicts.csv " + std::to_string(verdicts.size()) + " verdicts, " + std::to_string(on) +
             " ON, " + std::to_string(rises) + " episode(s)";
    });
    for (const auto& s : summaries) out << s << '\n';
    cmd.write_manifest();
  }
};

// --------------------------------------------------------------- calibrate

KvDocument calibration_report(const std::vector<ScoreEnvelope>& envelopes, const CalibrationResult& result) {
  KvDocument doc;
  doc.set("format", std::string("crashdet-calibration/1"));
  doc.set("detector", std::string("cepstral"));
  doc.set("traces", envelopes.size());
  for (std::size_t i = 0; i < envelopes.size(); ++i) {
    const auto& e = envelopes[i];
    const std::string prefix = "trace." + std::to_string(i + 1) + ".";
    doc.set(prefix + "name", e.trace);
    doc.set(prefix + "nominal_max", e.nominal_max ? format_number(*e.nominal_max) : std::string("none"));
    std::string peaks;
    for (std::size_t k = 0; k < e.crash_peaks.size(); ++k) peaks += (k > 0 ? "," : "") + format_number(e.crash_peaks[k]);
    doc.set(prefix + "crash_peaks", peaks.empty() ? std::string("none") : peaks);
  }
  doc.set("normal_max", result.normal_max);
  doc.set("crash_min", result.crash_min);
  doc.set("margin", result.crash_min - result.normal_max);
  doc.set("feasible", result.feasible());
  doc.set("gamma", result.gamma ? format_number(*result.gamma) : std::string("none"));
  return doc;
}

std::vector<ScoreEnvelope> envelopes_from_kv(const KvDocument& doc) {
  const auto n = doc.require_size("traces");
  std::vector<ScoreEnvelope> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string prefix = "trace." + std::to_string(i + 1) + ".";
    ScoreEnvelope e;
    e.trace = doc.require(prefix + "name");
    if (doc.require(prefix + "nominal_max") != "none") e.nominal_max = doc.require_double(prefix + "nominal_max");
    const auto& peaks = doc.require(prefix + "crash_peaks");
    if (peaks != "none") {
      std::size_t start = 0;
      while (true) {
        const auto end = peaks.find(',', start);
        double v = 0.0;
        const auto token = std::string_view(peaks).substr(start, end == std::string::npos ? end : end - start);
        if (!parse_double(token, v) || !std::isfinite(v))
          throw ConfigError("envelope " + e.trace + " has a malformed crash peak");
        e.crash_peaks.push_back(v);
        if (end == std::string::npos) break;
        start = end + 1;
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

struct CalibrateCommand {
  Command cmd;
  std::vector<std::string> traces;
  std::vector<std::string> envelopes;
  CepstralOptions cepstral;
  std::string pad = "auto";

  explicit CalibrateCommand(CLI::App& app)
      : cmd(app, "calibrate", "Suggest gamma_cep from nominal and crash score envelopes") {
    cmd.option("trace", traces, "Labelled trace (repeatable)");
    cmd.option("envelopes", envelopes, "Envelope file in calibration-report form (repeatable)");
    cepstral.add_to(cmd, false);
    cmd.option("pad", pad, "Seconds around each crash excluded from the nominal envelope, or 'auto' (w_eff)");
  }

  void execute(std::ostream& out) {
    if (traces.empty() && envelopes.empty()) throw ConfigError("calibrate needs --trace or --envelopes inputs");
    require_files(traces, "trace");
    require_files(envelopes, "envelope file");
    const auto stems = unique_stems(traces);
    const auto ccfg = cepstral.config();
    cepstral.echo(cmd, ccfg);
    const double pad_s = resolve_pad(pad, ccfg.effective_window_seconds());
    cmd.resolved("pad_s", format_number(pad_s));

    std::vector<ScoreEnvelope> all;
    for (const auto& path : envelopes) {
      auto more = envelopes_from_kv(KvDocument::load(path));
      all.insert(all.end(), more.begin(), more.end());
    }

    cmd.prepare_output();
    const auto loaded = load_traces(traces, ccfg.sample_rate);
    auto computed = fan_out(loaded.size(), [&](std::size_t i) {
      const auto verdicts = run_cepstral(loaded[i].rows, ccfg);
      return score_envelope(stems[i], verdicts, loaded[i].labels, pad_s);
    });
    all.insert(all.end(), computed.begin(), computed.end());
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.trace < b.trace; });

    const bool has_crash = std::any_of(all.begin(), all.end(), [](const auto& e) { return !e.crash_peaks.empty(); });
    if (!has_crash) throw ConfigError("calibration needs at least one crash-labelled trace (no crash envelope)");

    const auto result = calibrate(all);
    calibration_report(all, result).save(cmd.out_dir() / "calibration.kv");
    cmd.write_manifest();
    out << "normal_max=" << format_number(result.normal_max) << " crash_min=" << format_number(result.crash_min)
        << '\n';
    if (!result.feasible()) throw CalibrationError(result.normal_max, result.crash_min);
    out << "gamma=" << format_number(*result.gamma) << '\n';
  }
};

// ---------------------------------------------------------------- evaluate

KvDocument comparison_report(const std::vector<EvalReport>& reports) {
  KvDocument doc;
  doc.set("format", std::string("crashdet-comparison/1"));
  std::string names;
  for (const auto& r : reports) names += (names.empty() ? "" : ",") + r.detector;
  doc.set("detectors", names);
  for (const auto& r : reports) {
    doc.set(r.detector + ".events", r.events.size());
    doc.set(r.detector + ".events_detected", r.detected_count());
    doc.set(r.detector + ".false_positive_episodes", r.false_positive_episodes);
    const auto c = r.flag_consistency();
    doc.set(r.detector + ".flag_consistency_s", c ? format_number(*c) : std::string("none"));
    doc.set(r.detector + ".trace_hours", r.trace_hours());
  }
  return doc;
}

struct EvaluateCommand {
  Command cmd;
  std::vector<std::string> traces;
  std::string verdict_dir = ".";
  std::string detector = "cepstral";
  std::vector<std::string> verdicts;
  std::vector<std::string> labels;
  double sample_rate = kDefaultSampleRate;
  double window_seconds = 10.0;
  std::string pad = "auto";

  explicit EvaluateCommand(CLI::App& app) : cmd(app, "evaluate", "Score verdict streams against crash labels") {
    cmd.option("trace", traces, "Trace whose .events labels and STEM.DETECTOR.verdicts.csv are used (repeatable)");
    cmd.option("verdict-dir", verdict_dir, "Directory holding the verdict streams of --trace inputs");
    cmd.option("detector", detector, "cepstral, threshold, mahalanobis, a comma list, or all (with --trace)");
    cmd.option("verdicts", verdicts, "Verdict stream given directly (repeatable, alternative to --trace)");
    cmd.option("labels", labels, "Label file for each --verdicts input, in the same order");
    cmd.option("sample-rate", sample_rate, "Sample rate of the verdict time base (Hz)");
    cmd.option("window-seconds", window_seconds, "Cepstral window w (s); sets the automatic pad");
    cmd.option("pad", pad, "Detection/guard pad after (and before) each event, or 'auto' (w_eff)");
  }

  struct Input {
    std::string name;
    fs::path verdicts;
    std::optional<fs::path> labels;
  };

  static void check_time_base(const std::vector<DetectorVerdict>& v, double fs, const fs::path& path) {
    const double period = 1.0 / fs;
    for (std::size_t i = 1; i < v.size(); ++i)
      if (std::abs(v[i].t - v[i - 1].t - period) > kJitterTolerance * period)
        throw DataError("time-base mismatch in " + path.string() + " at t=" + format_number(v[i].t) +
                        " s: step differs from 1/fs=" + format_number(period) + " s");
  }

  void execute(std::ostream& out) {
    CepstralConfig window;
    window.window_seconds = window_seconds;
    window.sample_rate = sample_rate;
    window.validate();
    const EvalConfig ecfg{sample_rate, resolve_pad(pad, window.effective_window_seconds())};
    ecfg.validate();
    cmd.resolved("pad_s", format_number(ecfg.pad_seconds));

    // detector name -> inputs sorted by trace name
    std::map<std::string, std::vector<Input>> plan;
    std::vector<std::string> order;
    if (!verdicts.empty()) {
      if (!traces.empty()) throw ConfigError("use either --trace or --verdicts, not both");
      if (!labels.empty() && labels.size() != verdicts.size())
        throw ConfigError("--labels must be given once per --verdicts input");
      require_files(verdicts, "verdict stream");
      require_files(labels, "label file");
      for (std::size_t i = 0; i < verdicts.size(); ++i) {
        Input in{fs::path(verdicts[i]).filename().string(), verdicts[i], std::nullopt};
        if (!labels.empty()) in.labels = labels[i];
        plan[""].push_back(std::move(in));
      }
      order.push_back("");
    } else {
      if (traces.empty()) throw ConfigError("evaluate needs --trace or --verdicts inputs");
      if (!labels.empty()) throw ConfigError("--labels only applies to --verdicts inputs");
      const auto stems = unique_stems(traces);
      for (const auto id : parse_detectors(detector)) {
        const std::string name(to_string(id));
        order.push_back(name);
        for (std::size_t i = 0; i < traces.size(); ++i) {
          Input in{stems[i], fs::path(verdict_dir) / (stems[i] + "." + name + ".verdicts.csv"), std::nullopt};
          const auto sidecar = events_path_for(traces[i]);
          if (fs::exists(sidecar)) in.labels = sidecar;
          plan[name].push_back(std::move(in));
        }
      }
      for (const auto& [name, inputs] : plan)
        for (const auto& in : inputs)
          if (!fs::is_regular_file(in.verdicts)) throw ConfigError("verdict stream not found: " + in.verdicts.string());
    }

    cmd.prepare_output();
    std::vector<EvalReport> merged;
    for (const auto& name : order) {
      auto inputs = plan[name];
      std::stable_sort(inputs.begin(), inputs.end(), [](const Input& a, const Input& b) { return a.name < b.name; });
      const auto reports = fan_out(inputs.size(), [&](std::size_t i) {
        const auto v = read_verdicts(inputs[i].verdicts);
        check_time_base(v, sample_rate, inputs[i].verdicts);
        const auto l = inputs[i].labels ? parse_events(*inputs[i].labels) : std::vector<TraceEvent>{};
        const std::string det = v.empty() ? (name.empty() ? std::string("unknown") : name)
                                          : std::string(to_string(v.front().detector));
        return evaluate(v, l, ecfg, det);
      });
      EvalReport total;
      for (const auto& r : reports) total = merge(total, r);
      if (total.traces == 0) total.detector = name;
      const std::string det = total.detector.empty() ? std::string("unknown") : total.detector;
      if (std::any_of(merged.begin(), merged.end(), [&](const auto& r) { return r.detector == det; }))
        throw ConfigError("detector " + det + " evaluated twice");
      to_kv(total).save(cmd.out_dir() / (det + ".report"));
      out << det << ": " << total.detected_count() << '/' << total.events.size() << " events detected, "
          << total.false_positive_episodes << " false-positive episode(s) over "
          << format_number(total.trace_hours()) << " h\n";
      merged.push_back(std::move(total));
    }
    if (merged.size() > 1) comparison_report(merged).save(cmd.out_dir() / "comparison.report");
    cmd.write_manifest();
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Crash detection toolkit for powered two-wheelers", "crashdet"};
  app.require_subcommand(1);
  SimulateCommand simulate(app);
  FitCommand fit(app);
  DetectCommand detect(app);
  CalibrateCommand calibrate_cmd(app);
  EvaluateCommand evaluate_cmd(app);

  std::vector<std::string> argv = args;
  try {
    if (!argv.empty()) {
      for (const Command* c : {&simulate.cmd, &fit.cmd, &detect.cmd, &calibrate_cmd.cmd, &evaluate_cmd.cmd})
        if (c->name() == argv.front()) c->inject_config(argv);
    }
    std::reverse(argv.begin(), argv.end());
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
  } catch (const ConfigError& e) {
    err << "crashdet: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (simulate.cmd.app()->parsed()) simulate.execute(out);
    if (fit.cmd.app()->parsed()) fit.execute(out);
    if (detect.cmd.app()->parsed()) detect.execute(out);
    if (calibrate_cmd.cmd.app()->parsed()) calibrate_cmd.execute(out);
    if (evaluate_cmd.cmd.app()->parsed()) evaluate_cmd.execute(out);
  } catch (const ConfigError& e) {
    err << "crashdet: invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "crashdet: error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace crashdet::cli
