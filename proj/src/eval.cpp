#include "crashdet/eval.hpp"

#include <algorithm>
#include <cmath>

#include "crashdet/errors.hpp"
#include "crashdet/format.hpp"

namespace crashdet {

void EvalConfig::validate() const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) throw ConfigError("sample_rate must be positive");
  if (!(pad_seconds >= 0.0) || !std::isfinite(pad_seconds)) throw ConfigError("pad_seconds must be >= 0");
}

std::size_t EvalReport::detected_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(events.begin(), events.end(), [](const auto& e) { return e.detected; }));
}

std::optional<double> EvalReport::flag_consistency() const noexcept {
  if (on_runs == 0) return std::nullopt;
  return static_cast<double>(on_run_samples) / sample_rate / static_cast<double>(on_runs);
}

EvalReport evaluate(std::span<const DetectorVerdict> verdicts, std::span<const TraceEvent> labels,
                    const EvalConfig& config, std::string detector) {
  config.validate();
  std::vector<TraceEvent> crashes;
  for (const auto& e : labels) {
    validate(e);
    if (e.kind == EventKind::crash) crashes.push_back(e);
  }
  std::sort(crashes.begin(), crashes.end(), [](const auto& a, const auto& b) { return a.start_t < b.start_t; });
  for (std::size_t i = 1; i < crashes.size(); ++i)
    if (crashes[i].start_t < crashes[i - 1].end_t())
      throw DataError("overlapping crash labels at " + format_number(crashes[i - 1].start_t) + " s and " +
                      format_number(crashes[i].start_t) + " s");
  if (!crashes.empty()) {
    if (verdicts.empty()) throw DataError("labels given but the verdict stream is empty");
    const double first = verdicts.front().t;
    const double last = verdicts.back().t;
    for (const auto& e : crashes)
      if (e.start_t < first || e.start_t > last)
        throw DataError("crash label at " + format_number(e.start_t) + " s lies outside the verdict time base [" +
                        format_number(first) + ", " + format_number(last) + "] s");
  }

  EvalReport report;
  report.detector = std::move(detector);
  report.sample_rate = config.sample_rate;
  report.pad_seconds = config.pad_seconds;
  report.traces = 1;
  report.samples = verdicts.size();
  for (const auto& e : crashes) report.events.push_back({e, false, std::nullopt});

  const double pad = config.pad_seconds;
  auto in_guard = [&](double t) {
    return std::any_of(crashes.begin(), crashes.end(),
                       [&](const TraceEvent& e) { return t >= e.start_t - pad && t <= e.end_t() + pad; });
  };

  for (auto& outcome : report.events) {
    const auto& e = outcome.event;
    for (const auto& v : verdicts) {
      if (v.t < e.start_t) continue;
      if (v.t > e.end_t() + pad) break;
      if (v.flag) {
        outcome.detected = true;
        outcome.latency = v.t - e.start_t;
        break;
      }
    }
  }

  bool previous = false;
  std::size_t run_start = 0;
  auto close_run = [&](std::size_t begin, std::size_t end) {
    const double t0 = verdicts[begin].t;
    const double t1 = verdicts[end - 1].t;
    for (const auto& outcome : report.events) {
      if (!outcome.detected) continue;
      const auto& e = outcome.event;
      if (t1 >= e.start_t && t0 <= e.end_t() + pad) {
        ++report.on_runs;
        report.on_run_samples += end - begin;
        return;
      }
    }
  };
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    const bool flag = verdicts[i].flag;
    if (flag && !previous) {
      run_start = i;
      if (!in_guard(verdicts[i].t)) ++report.false_positive_episodes;
    } else if (!flag && previous) {
      close_run(run_start, i);
    }
    previous = flag;
  }
  if (previous) close_run(run_start, verdicts.size());
  return report;
}

EvalReport merge(const EvalReport& a, const EvalReport& b) {
  if (a.traces == 0) return b;
  if (b.traces == 0) return a;
  if (a.detector != b.detector) throw ConfigError("cannot merge reports of different detectors");
  if (a.sample_rate != b.sample_rate || a.pad_seconds != b.pad_seconds)
    throw ConfigError("cannot merge reports with different sample rate or pad");
  EvalReport m = a;
  m.traces += b.traces;
  m.samples += b.samples;
  m.events.insert(m.events.end(), b.events.begin(), b.events.end());
  m.false_positive_episodes += b.false_positive_episodes;
  m.on_runs += b.on_runs;
  m.on_run_samples += b.on_run_samples;
  return m;
}

KvDocument to_kv(const EvalReport& r) {
  KvDocument doc;
  doc.set("format", std::string("crashdet-report/1"));
  doc.set("detector", r.detector.empty() ? std::string("unknown") : r.detector);
  doc.set("sample_rate", r.sample_rate);
  doc.set("pad_s", r.pad_seconds);
  doc.set("traces", r.traces);
  doc.set("samples", r.samples);
  doc.set("trace_hours", r.trace_hours());
  doc.set("events", r.events.size());
  doc.set("events_detected", r.detected_count());
  for (std::size_t i = 0; i < r.events.size(); ++i) {
    const auto& o = r.events[i];
    const std::string prefix = "event." + std::to_string(i + 1) + ".";
    doc.set(prefix + "start_t", o.event.start_t);
    doc.set(prefix + "duration", o.event.duration);
    doc.set(prefix + "detected", o.detected);
    doc.set(prefix + "latency_s", o.latency ? format_number(*o.latency) : std::string("none"));
  }
  doc.set("false_positive_episodes", r.false_positive_episodes);
  doc.set("on_runs", r.on_runs);
  doc.set("on_run_samples", r.on_run_samples);
  const auto c = r.flag_consistency();
  doc.set("flag_consistency_s", c ? format_number(*c) : std::string("none"));
  return doc;
}

EvalReport report_from_kv(const KvDocument& doc) {
  if (doc.require("format") != "crashdet-report/1") throw ConfigError("not a crashdet-report/1 document");
  EvalReport r;
  r.detector = doc.require("detector");
  r.sample_rate = doc.require_double("sample_rate");
  r.pad_seconds = doc.require_double("pad_s");
  r.traces = doc.require_size("traces");
  r.samples = doc.require_size("samples");
  const auto n = doc.require_size("events");
  for (std::size_t i = 0; i < n; ++i) {
    const std::string prefix = "event." + std::to_string(i + 1) + ".";
    EventOutcome o;
    o.event = {EventKind::crash, doc.require_double(prefix + "start_t"), doc.require_double(prefix + "duration")};
    o.detected = doc.require_bool(prefix + "detected");
    if (doc.require(prefix + "latency_s") != "none") o.latency = doc.require_double(prefix + "latency_s");
    r.events.push_back(o);
  }
  r.false_positive_episodes = doc.require_size("false_positive_episodes");
  r.on_runs = doc.require_size("on_runs");
  r.on_run_samples = doc.require_size("on_run_samples");
  return r;
}

}  // namespace crashdet
