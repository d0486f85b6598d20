#include "crashdet/trace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "crashdet/errors.hpp"
#include "crashdet/format.hpp"

namespace crashdet {

namespace {

struct ColumnSpec {
  std::string_view name;
  std::string_view unit;
};

constexpr std::array<ColumnSpec, 7> kColumns{{{"t", "s"},
                                              {"ax", "m/s^2"},
                                              {"ay", "m/s^2"},
                                              {"az", "m/s^2"},
                                              {"wx", "rad/s"},
                                              {"wz", "rad/s"},
                                              {"speed", "m/s"}}};
constexpr std::size_t kSpeedColumn = 6;

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double& field(ImuSample& s, std::size_t column) {
  switch (column) {
    case 0:
      return s.t;
    case 1:
      return s.ax;
    case 2:
      return s.ay;
    case 3:
      return s.az;
    case 4:
      return s.wx;
    default:
      return s.wz;
  }
}

double quantize(double v) {
  double out = 0.0;
  parse_double(format_number(v), out);
  return out;
}

void check_metadata_text(std::string_view text) {
  if (text.find_first_of(";\n\r") != std::string_view::npos)
    throw ConfigError("trace metadata must not contain ';' or line breaks: '" + std::string(text) + "'");
}

}  // namespace

double TraceFile::duration() const noexcept {
  if (rows.size() < 2) return 0.0;
  return rows.back().t - rows.front().t;
}

void validate_trace(const TraceFile& trace) {
  const double fs = trace.header.sample_rate;
  if (!(fs > 0.0) || !std::isfinite(fs)) throw ParseError("sample rate must be positive", 1, "fs");
  const double period = 1.0 / fs;
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const auto& s = trace.rows[i];
    const std::size_t line = i + 2;
    if (!std::isfinite(s.t)) throw ParseError("non-finite value", line, "t");
    const auto values = s.inertial();
    for (std::size_t j = 0; j < values.size(); ++j)
      if (!std::isfinite(values[j])) throw ParseError("non-finite value", line, std::string(kInertialNames[j]));
    if (s.speed.has_value() != trace.header.has_speed)
      throw ParseError(trace.header.has_speed ? "missing speed value" : "unexpected speed value", line, "speed");
    if (s.speed && !std::isfinite(*s.speed)) throw ParseError("non-finite value", line, "speed");
    if (i > 0) {
      const double step = s.t - trace.rows[i - 1].t;
      if (!(step > 0.0)) throw ParseError("non-monotone timestamp", line, "t");
      if (std::abs(step - period) > kJitterTolerance * period)
        throw ParseError("timestamp step " + format_number(step) + " s deviates from 1/fs by more than 1%", line,
                         "t");
    }
  }
  for (const auto& e : trace.labels) validate(e);
}

void write_trace(const TraceFile& trace, std::ostream& out) {
  validate_trace(trace);
  const std::size_t columns = trace.header.has_speed ? kColumns.size() : kSpeedColumn;
  for (std::size_t c = 0; c < columns; ++c) {
    if (c > 0) out << ',';
    out << kColumns[c].name << '[' << kColumns[c].unit << ']';
  }
  out << ";fs=" << format_number(trace.header.sample_rate);
  for (const auto& [key, value] : trace.header.metadata) {
    check_metadata_text(key);
    check_metadata_text(value);
    if (key.empty() || key.find('=') != std::string::npos || key == "fs")
      throw ConfigError("invalid trace metadata key '" + key + "'");
    out << ';' << key << '=' << value;
  }
  out << '\n';
  for (const auto& s : trace.rows) {
    out << format_number(s.t) << ',' << format_number(s.ax) << ',' << format_number(s.ay) << ','
        << format_number(s.az) << ',' << format_number(s.wx) << ',' << format_number(s.wz);
    if (trace.header.has_speed) out << ',' << format_number(*s.speed);
    out << '\n';
  }
}

TraceFile read_trace(std::istream& in) {
  TraceFile trace;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", 1);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto sections = split(line, ';');
  std::optional<double> fs;
  for (std::size_t i = 1; i < sections.size(); ++i) {
    const auto kv = sections[i];
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos || eq == 0) throw ParseError("malformed header field '" + std::string(kv) + "'", 1);
    const std::string key(kv.substr(0, eq));
    const std::string value(kv.substr(eq + 1));
    if (key == "fs") {
      double v = 0.0;
      if (!parse_double(value, v) || !(v > 0.0) || !std::isfinite(v)) throw ParseError("invalid sample rate", 1, "fs");
      fs = v;
    } else {
      trace.header.metadata.emplace_back(key, value);
    }
  }
  if (!fs) throw ParseError("header does not declare fs", 1);
  trace.header.sample_rate = *fs;

  // column index in the file -> canonical column (or npos for ignored extras)
  constexpr std::size_t kIgnored = static_cast<std::size_t>(-1);
  std::vector<std::size_t> layout;
  std::array<bool, kColumns.size()> seen{};
  std::vector<std::string> file_names;
  for (const auto token : split(sections[0], ',')) {
    const auto name_unit = trim(token);
    const auto open = name_unit.find('[');
    if (open == std::string_view::npos || name_unit.back() != ']')
      throw ParseError("column '" + std::string(name_unit) + "' lacks a [unit]", 1);
    const auto name = name_unit.substr(0, open);
    const auto unit = name_unit.substr(open + 1, name_unit.size() - open - 2);
    file_names.emplace_back(name);
    const auto it = std::find_if(kColumns.begin(), kColumns.end(), [&](const ColumnSpec& c) { return c.name == name; });
    if (it == kColumns.end()) {
      layout.push_back(kIgnored);
      continue;
    }
    const auto idx = static_cast<std::size_t>(it - kColumns.begin());
    if (it->unit != unit)
      throw ParseError("unit mismatch: expected [" + std::string(it->unit) + "], got [" + std::string(unit) + "]", 1,
                       std::string(name));
    if (seen[idx]) throw ParseError("duplicate column", 1, std::string(name));
    seen[idx] = true;
    layout.push_back(idx);
  }
  for (std::size_t c = 0; c < kSpeedColumn; ++c)
    if (!seen[c]) throw ParseError("missing required column", 1, std::string(kColumns[c].name));
  trace.header.has_speed = seen[kSpeedColumn];

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != layout.size())
      throw ParseError("expected " + std::to_string(layout.size()) + " fields, got " + std::to_string(fields.size()),
                       line_no);
    ImuSample s;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (layout[c] == kIgnored) continue;
      double v = 0.0;
      if (!parse_double(fields[c], v)) throw ParseError("malformed number '" + std::string(fields[c]) + "'", line_no, file_names[c]);
      if (!std::isfinite(v)) throw ParseError("non-finite value", line_no, file_names[c]);
      if (layout[c] == kSpeedColumn)
        s.speed = v;
      else
        field(s, layout[c]) = v;
    }
    if (!trace.rows.empty()) {
      const double step = s.t - trace.rows.back().t;
      const double period = 1.0 / trace.header.sample_rate;
      if (!(step > 0.0)) throw ParseError("non-monotone timestamp", line_no, "t");
      if (std::abs(step - period) > kJitterTolerance * period)
        throw ParseError("timestamp step " + format_number(step) + " s deviates from 1/fs by more than 1%", line_no,
                         "t");
    }
    trace.rows.push_back(s);
  }
  return trace;
}

void write_events(std::span<const TraceEvent> events, std::ostream& out) {
  out << "# kind,start_t,duration\n";
  for (const auto& e : events) {
    validate(e);
    out << to_string(e.kind) << ',' << format_number(e.start_t) << ',' << format_number(e.duration) << '\n';
  }
}

std::vector<TraceEvent> read_events(std::istream& in) {
  std::vector<TraceEvent> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = split(text, ',');
    if (fields.size() != 3) throw ParseError("expected kind,start_t,duration", line_no);
    TraceEvent e;
    try {
      e.kind = parse_event_kind(trim(fields[0]));
    } catch (const ConfigError&) {
      throw ParseError("unknown event kind '" + std::string(trim(fields[0])) + "'", line_no, "kind");
    }
    if (!parse_double(fields[1], e.start_t) || !std::isfinite(e.start_t))
      throw ParseError("malformed start time", line_no, "start_t");
    if (!parse_double(fields[2], e.duration) || !std::isfinite(e.duration))
      throw ParseError("malformed duration", line_no, "duration");
    try {
      validate(e);
    } catch (const ConfigError& err) {
      throw ParseError(err.what(), line_no, "duration");
    }
    events.push_back(e);
  }
  return events;
}

std::filesystem::path events_path_for(const std::filesystem::path& trace_path) {
  auto p = trace_path;
  p.replace_extension(".events");
  return p;
}

std::vector<TraceEvent> parse_events(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open label file " + path.string());
  return read_events(in);
}

TraceFile parse_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open trace " + path.string());
  TraceFile trace = read_trace(in);
  const auto sidecar = events_path_for(path);
  if (std::filesystem::exists(sidecar)) trace.labels = parse_events(sidecar);
  return trace;
}

void write_trace(const TraceFile& trace, const std::filesystem::path& path) {
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write trace " + path.string());
    write_trace(trace, out);
    if (!out) throw DataError("I/O error writing " + path.string());
  }
  std::ofstream events(events_path_for(path), std::ios::binary | std::ios::trunc);
  if (!events) throw DataError("cannot write labels for " + path.string());
  write_events(trace.labels, events);
  if (!events) throw DataError("I/O error writing labels for " + path.string());
}

TraceFile quantized(const TraceFile& trace) {
  TraceFile q = trace;
  q.header.sample_rate = quantize(q.header.sample_rate);
  for (auto& s : q.rows) {
    s.t = quantize(s.t);
    s.ax = quantize(s.ax);
    s.ay = quantize(s.ay);
    s.az = quantize(s.az);
    s.wx = quantize(s.wx);
    s.wz = quantize(s.wz);
    if (s.speed) s.speed = quantize(*s.speed);
  }
  for (auto& e : q.labels) {
    e.start_t = quantize(e.start_t);
    e.duration = quantize(e.duration);
  }
  return q;
}

}  // namespace crashdet
